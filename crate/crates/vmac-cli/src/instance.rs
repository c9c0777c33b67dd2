//! Plain-text channel instance files:
//!
//! ```text
//! L U
//! re im        (L*U lines, the channel matrix row by row)
//! P_1 ... P_U
//! s2_1 ... s2_L
//! mu_1 ... mu_U
//! C
//! ```
//!
//! Parse failures carry the 1-based line and column of the offending token.

use vmac_core::{ChannelState, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone)]
pub struct Instance {
    pub channel: ChannelState,
    pub weights: Vec<f64>,
    pub budget_bits: f64,
}

struct Tokens<'a> {
    tokens: Vec<(usize, usize, &'a str)>,
    next: usize,
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut last_line = 1;
        for (ln, line) in text.lines().enumerate() {
            let mut col = 1;
            for piece in line.split_whitespace() {
                let offset = line[col - 1..].find(piece).unwrap_or(0);
                tokens.push((ln + 1, col + offset, piece));
                col += offset + piece.len();
            }
            last_line = ln + 1;
        }
        Self { tokens, next: 0, last_line }
    }

    fn take(&mut self, what: &str) -> Result<(usize, usize, &'a str), ParseError> {
        if self.next >= self.tokens.len() {
            return Err(ParseError {
                line: self.last_line,
                column: 1,
                message: format!("unexpected end of file, expected {what}"),
            });
        }
        let t = self.tokens[self.next];
        self.next += 1;
        Ok(t)
    }

    fn number(&mut self, what: &str) -> Result<f64, ParseError> {
        let (line, column, text) = self.take(what)?;
        text.parse::<f64>().map_err(|_| ParseError {
            line,
            column,
            message: format!("expected {what}, found `{text}`"),
        })
    }

    fn count(&mut self, what: &str) -> Result<usize, ParseError> {
        let (line, column, text) = self.take(what)?;
        match text.parse::<usize>() {
            Ok(v) if v > 0 => Ok(v),
            _ => Err(ParseError {
                line,
                column,
                message: format!("expected positive {what}, found `{text}`"),
            }),
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        if self.next < self.tokens.len() {
            let (line, column, text) = self.tokens[self.next];
            return Err(ParseError {
                line,
                column,
                message: format!("unexpected trailing token `{text}`"),
            });
        }
        Ok(())
    }
}

pub fn parse_instance(text: &str) -> Result<Instance, ParseError> {
    let mut toks = Tokens::new(text);
    let l = toks.count("BS count L")?;
    let u = toks.count("user count U")?;
    let mut gains = Vec::with_capacity(l * u);
    for _ in 0..l * u {
        let re = toks.number("channel entry real part")?;
        let im = toks.number("channel entry imaginary part")?;
        gains.push(C64::new(re, im));
    }
    let power: Vec<f64> =
        (0..u).map(|_| toks.number("transmit power")).collect::<Result<_, _>>()?;
    let noise: Vec<f64> =
        (0..l).map(|_| toks.number("noise variance")).collect::<Result<_, _>>()?;
    let weights: Vec<f64> = (0..u).map(|_| toks.number("weight")).collect::<Result<_, _>>()?;
    let budget_bits = toks.number("backhaul budget")?;
    toks.finish()?;

    let channel = ChannelState::new(l, u, gains, power, noise).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;
    if budget_bits <= 0.0 {
        return Err(ParseError {
            line: toks.last_line,
            column: 1,
            message: "backhaul budget must be positive".into(),
        });
    }
    Ok(Instance { channel, weights, budget_bits })
}

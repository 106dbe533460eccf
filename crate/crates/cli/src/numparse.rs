//! Number grammar for flags and config values.
//!
//! ```text
//! real    := sum
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := NUMBER | 'pi' | 'sqrt' '(' sum ')' | '(' sum ')'
//! complex := term (('+' | '-') term)*
//! qubit   := complex (',' complex)*
//! ```
//!
//! A term is a real expression, or one in which a single `i` stands as a
//! factor outside parentheses: `i`, `-i/2`, `2i/sqrt(5)`, `sqrt(0.3)i`.
//!
//! Examples: `0.5`, `1/sqrt(2)`, `0.6-0.8i`, `-1/sqrt(8)-1/sqrt(8)i`.
//! `-(1+i)/sqrt(8)` is rejected: `i` may not appear inside parentheses.

use std::f64::consts::PI;

use num_complex::Complex64;

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("cannot parse {input:?}: {reason}")]
pub struct ParseError {
    pub input: String,
    pub reason: String,
}

fn err(input: &str, reason: impl Into<String>) -> ParseError {
    ParseError { input: input.to_string(), reason: reason.into() }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src, chars: src.chars().collect(), pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn skip_ws(&mut self) {
        while self.peek().is_some_and(char::is_whitespace) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        let n = w.chars().count();
        if self.chars.len() >= self.pos + n && self.chars[self.pos..self.pos + n].iter().copied().eq(w.chars()) {
            self.pos += n;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<f64, ParseError> {
        let mut v = self.product()?;
        loop {
            if self.eat('+') {
                v += self.product()?;
            } else if self.eat('-') {
                v -= self.product()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn product(&mut self) -> Result<f64, ParseError> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                v /= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64, ParseError> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<f64, ParseError> {
        if self.eat('(') {
            let v = self.sum()?;
            if !self.eat(')') {
                return Err(err(self.src, "missing ')'"));
            }
            return Ok(v);
        }
        if self.eat_word("sqrt") {
            if !self.eat('(') {
                return Err(err(self.src, "expected '(' after sqrt"));
            }
            let v = self.sum()?;
            if !self.eat(')') {
                return Err(err(self.src, "missing ')'"));
            }
            if v < 0.0 {
                return Err(err(self.src, "sqrt of a negative number"));
            }
            return Ok(v.sqrt());
        }
        if self.eat_word("pi") {
            return Ok(PI);
        }
        self.number()
    }

    fn number(&mut self) -> Result<f64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while let Some(c) = self.peek() {
            let exp_sign = (c == '-' || c == '+')
                && self.pos > start
                && matches!(self.chars[self.pos - 1], 'e' | 'E');
            if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        if text.is_empty() {
            return Err(err(self.src, format!("expected a number at position {start}")));
        }
        text.parse::<f64>().map_err(|_| err(self.src, format!("bad number {text:?}")))
    }
}

/// Parse a real expression.
pub fn parse_real(s: &str) -> Result<f64, ParseError> {
    let mut p = Parser::new(s);
    let v = p.sum()?;
    p.skip_ws();
    if p.pos != p.chars.len() {
        return Err(err(s, format!("unexpected trailing input at position {}", p.pos)));
    }
    if !v.is_finite() {
        return Err(err(s, "value is not finite"));
    }
    Ok(v)
}

/// Split at top-level occurrences of any char in `seps`, keeping the
/// separator with the following piece. A sign right after `e`/`E` inside a
/// number, or at the very start, does not split.
fn split_terms(s: &str) -> Vec<String> {
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut out = vec![];
    let mut cur = String::new();
    let mut depth = 0i32;
    for (k, &c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            _ => {}
        }
        let is_sign = c == '+' || c == '-';
        let after_exp = k >= 2 && matches!(chars[k - 1], 'e' | 'E') && chars[k - 2].is_ascii_digit();
        let after_op = k >= 1 && matches!(chars[k - 1], '*' | '/' | '(' | '+' | '-');
        if is_sign && depth == 0 && k > 0 && !after_exp && !after_op && !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
        cur.push(c);
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

/// If `term` carries the imaginary unit, return it with `i` replaced by 1.
fn imaginary_factor(term: &str) -> Result<Option<String>, String> {
    let chars: Vec<char> = term.chars().collect();
    let mut depth = 0i32;
    let mut at = None;
    for (k, &c) in chars.iter().enumerate() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            // the i of `pi` is part of the constant
            'i' if k > 0 && chars[k - 1] == 'p' => {}
            'i' => {
                if depth != 0 {
                    return Err("the imaginary unit may not appear inside parentheses".into());
                }
                if at.replace(k).is_some() {
                    return Err("more than one imaginary unit in a term".into());
                }
            }
            _ => {}
        }
    }
    let Some(k) = at else { return Ok(None) };
    let before = &chars[..k];
    let factor = if before.last().is_some_and(|c| c.is_ascii_digit() || *c == '.' || *c == ')') { "*1" } else { "1" };
    let mut out: String = before.iter().collect();
    out.push_str(factor);
    out.extend(&chars[k + 1..]);
    Ok(Some(out))
}

/// Parse `re+imi`-style complex numbers.
pub fn parse_complex(s: &str) -> Result<Complex64, ParseError> {
    let terms = split_terms(s);
    if terms.is_empty() {
        return Err(err(s, "empty complex number"));
    }
    // start from -0 so a lone `-0i` term keeps its sign
    let mut z = Complex64::new(-0.0, -0.0);
    for t in terms {
        match imaginary_factor(&t).map_err(|reason| err(s, reason))? {
            Some(body) => z.im += parse_real(&body).map_err(|e| err(s, e.reason))?,
            None => z.re += parse_real(&t).map_err(|e| err(s, e.reason))?,
        }
    }
    Ok(Complex64::new(z.re + 0.0, if z.im == 0.0 && !s.contains('i') { 0.0 } else { z.im }))
}

/// Comma-separated complex components.
pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, ParseError> {
    s.split(',').map(|part| parse_complex(part.trim())).collect()
}

/// Comma-separated nonnegative integers, e.g. a multi-index `2,0,1`.
pub fn parse_index_list(s: &str) -> Result<Vec<u32>, ParseError> {
    s.split(',')
        .map(|part| part.trim().parse::<u32>().map_err(|_| err(s, format!("bad index {part:?}"))))
        .collect()
}

/// Canonical text for a complex number, re-parseable by [`parse_complex`].
pub fn fmt_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

pub fn fmt_complex_list(zs: &[Complex64]) -> String {
    zs.iter().map(|z| fmt_complex(*z)).collect::<Vec<_>>().join(",")
}

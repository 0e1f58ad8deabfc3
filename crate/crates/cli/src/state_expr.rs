//! State expressions such as `phi0 + phi1`, `2*psi1 - (0.5,1)*e0` or
//! `i phi1`: complex linear combinations of basis symbols.

use nhqdyn::{Complex, System, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Phi,
    Psi,
    E,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: Complex<f64>,
    pub family: Family,
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateExpr {
    pub terms: Vec<Term>,
}

impl StateExpr {
    pub fn max_index(&self) -> usize {
        self.terms.iter().map(|t| t.index).max().unwrap_or(0)
    }

    pub fn evaluate(&self, sys: &System) -> Vector {
        let mut out = Vector::zeros(sys.dim());
        for t in &self.terms {
            let basis = match t.family {
                Family::Phi => sys.phi(),
                Family::Psi => sys.psi(),
                Family::E => sys.e(),
            };
            out += &basis[t.index].scale(t.coefficient);
        }
        out
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn error(&self, what: &str) -> String {
        format!("{what} at offset {} in `{}`", self.pos, self.src)
    }

    fn number(&mut self) -> Result<f64, String> {
        self.skip_ws();
        let rest = self.rest();
        let mut end = 0;
        let bytes = rest.as_bytes();
        while end < bytes.len() {
            let b = bytes[end];
            let prev_exp = end > 0 && matches!(bytes[end - 1], b'e' | b'E');
            let exponent = (b == b'e' || b == b'E')
                && end > 0
                && bytes
                    .get(end + 1)
                    .is_some_and(|n| n.is_ascii_digit() || *n == b'+' || *n == b'-');
            if b.is_ascii_digit() || b == b'.' || ((b == b'+' || b == b'-') && prev_exp) || exponent {
                end += 1;
            } else {
                break;
            }
        }
        if end == 0 {
            return Err(self.error("expected a number"));
        }
        let value = rest[..end]
            .parse::<f64>()
            .map_err(|_| self.error("malformed number"))?;
        self.pos += end;
        Ok(value)
    }

    /// `x`, `xi`, `i`, or `(re, im)`.
    fn coefficient(&mut self) -> Result<Option<Complex<f64>>, String> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let re = self.signed_number()?;
                if !self.eat(',') {
                    return Err(self.error("expected `,`"));
                }
                let im = self.signed_number()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(Some(Complex::new(re, im)))
            }
            Some(c) if c.is_ascii_digit() || c == '.' => {
                let x = self.number()?;
                if self.rest().starts_with('i') && !self.rest()[1..].starts_with(char::is_alphanumeric) {
                    self.pos += 1;
                    Ok(Some(Complex::new(0.0, x)))
                } else {
                    Ok(Some(Complex::new(x, 0.0)))
                }
            }
            Some('i') if !self.rest()[1..].starts_with(char::is_alphanumeric) => {
                self.pos += 1;
                Ok(Some(Complex::new(0.0, 1.0)))
            }
            _ => Ok(None),
        }
    }

    fn signed_number(&mut self) -> Result<f64, String> {
        let sign = if self.eat('-') {
            -1.0
        } else {
            self.eat('+');
            1.0
        };
        Ok(sign * self.number()?)
    }

    fn symbol(&mut self) -> Result<(Family, usize), String> {
        self.skip_ws();
        let rest = self.rest();
        let (family, len) = if rest.starts_with("phi") {
            (Family::Phi, 3)
        } else if rest.starts_with("psi") {
            (Family::Psi, 3)
        } else if rest.starts_with('e') {
            (Family::E, 1)
        } else {
            return Err(self.error("expected a basis symbol (phiN, psiN or eN)"));
        };
        let digits: String = rest[len..].chars().take_while(|c| c.is_ascii_digit()).collect();
        if digits.is_empty() {
            return Err(self.error("basis symbol needs an index"));
        }
        let index = digits.parse().map_err(|_| self.error("index too large"))?;
        self.pos += len + digits.len();
        Ok((family, index))
    }

    fn term(&mut self, sign: f64) -> Result<Term, String> {
        let coefficient = self.coefficient()?;
        if coefficient.is_some() {
            self.eat('*');
        }
        let (family, index) = self.symbol()?;
        Ok(Term {
            coefficient: coefficient.unwrap_or(Complex::new(1.0, 0.0)) * sign,
            family,
            index,
        })
    }
}

pub fn parse(src: &str) -> Result<StateExpr, String> {
    let mut p = Parser { src, pos: 0 };
    let mut terms = Vec::new();
    let mut sign = if p.eat('-') {
        -1.0
    } else {
        p.eat('+');
        1.0
    };
    loop {
        terms.push(p.term(sign)?);
        if p.eat('+') {
            sign = 1.0;
        } else if p.eat('-') {
            sign = -1.0;
        } else {
            break;
        }
    }
    if p.peek().is_some() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(StateExpr { terms })
}

//! Text and JSON input/output for expressions.
//!
//! The text format is stable and round-trips: `print` emits a canonical
//! string, and `parse` accepts that string (plus whitespace, explicit `*`,
//! parentheses, and `NO(a,b)` nesting) back into a raw term for
//! canonicalization.
//!
//! Atom tokens: `J[i,j]`, `Cur[i,j]`, `PhiD[i,j]`, `Phi[i,j]`, `X`.
//! Derivatives: `S(...)`, `S^d(...)`. Scalars: rationals and `k^p`.

use crate::engine::{DerivGen, Expression, Family, Generator, KPoly, Monomial, RawTerm};
use crate::lca::Sector;
use crate::{rat, Error, Rat, Result};
use num::{BigInt, One, Signed};

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

fn atom_token(g: &Generator) -> String {
    match g.fam {
        Family::Cur => format!("Cur[{},{}]", g.a, g.b),
        Family::PhiD => format!("PhiD[{},{}]", g.a, g.b),
        Family::PhiU => format!("Phi[{},{}]", g.a, g.b),
        Family::JGen => format!("J[{},{}]", g.a, g.b),
        Family::Dummy => "X".to_string(),
    }
}

fn deriv_token(dg: &DerivGen) -> String {
    let base = atom_token(&dg.g);
    match dg.d {
        0 => base,
        1 => format!("S({base})"),
        d => format!("S^{d}({base})"),
    }
}

fn word_token(m: &Monomial) -> String {
    m.0.iter().map(deriv_token).collect::<Vec<_>>().join("")
}

/// One flattened term: magnitude * k-power * word, sign reported separately.
fn term_token(mono: &Monomial, kpow: u32, coeff: &Rat) -> (bool, String) {
    let neg = coeff.is_negative();
    let mag = coeff.abs();
    let mut parts: Vec<String> = Vec::new();
    if !mag.is_one() || (kpow == 0 && mono.is_vacuum()) {
        parts.push(mag.to_string());
    }
    match kpow {
        0 => {}
        1 => parts.push("k".into()),
        p => parts.push(format!("k^{p}")),
    }
    if !mono.is_vacuum() {
        parts.push(word_token(mono));
    }
    (neg, parts.join("*"))
}

/// Render an expression in the canonical text format.
pub fn print(e: &Expression) -> String {
    if e.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    let mut first = true;
    for (mono, kp) in e.iter() {
        for (kpow, coeff) in kp.iter() {
            let (neg, body) = term_token(mono, *kpow, coeff);
            if first {
                if neg {
                    out.push('-');
                }
                first = false;
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Sector inference
// ---------------------------------------------------------------------------

/// Infer which sector an expression's atoms belong to.
///
/// Returns `Ok(None)` when the atoms are admissible in both sectors
/// (pure `Phi` words, scalars); `Err` when the mix is contradictory.
pub fn infer_sector(e: &Expression) -> Result<Option<Sector>> {
    let mut complex = false;
    let mut walg = false;
    for (mono, _) in e.iter() {
        for dg in &mono.0 {
            match dg.g.fam {
                Family::Cur | Family::PhiD => complex = true,
                Family::JGen | Family::Dummy => walg = true,
                Family::PhiU => {}
            }
        }
    }
    match (complex, walg) {
        (true, true) => Err(Error::Sector(
            "expression mixes current/ghost atoms with W-algebra atoms".into(),
        )),
        (true, false) => Ok(Some(Sector::Complex)),
        (false, true) => Ok(Some(Sector::WAlgebra)),
        (false, false) => Ok(None),
    }
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
    n: u8,
}

enum Factor {
    Scalar(KPoly),
    Term(RawTerm),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, n: u8) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
            n,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            col: self.col,
            msg: msg.into(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<u8> {
        let c = self.peek()?;
        self.pos += 1;
        if c == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_ascii_whitespace()) {
            self.bump();
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        self.skip_ws();
        match self.peek() {
            Some(got) if got == c => {
                self.bump();
                Ok(())
            }
            Some(got) => Err(self.err(format!(
                "expected '{}', found '{}'",
                c as char, got as char
            ))),
            None => Err(self.err(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn parse_uint(&mut self) -> Result<u64> {
        self.skip_ws();
        let mut digits = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            digits.push(self.bump().unwrap() as char);
        }
        if digits.is_empty() {
            return Err(self.err("expected an integer"));
        }
        digits
            .parse::<u64>()
            .map_err(|_| self.err("integer literal too large"))
    }

    fn parse_ident(&mut self) -> String {
        let mut s = String::new();
        while matches!(self.peek(), Some(c) if c.is_ascii_alphabetic()) {
            s.push(self.bump().unwrap() as char);
        }
        s
    }

    fn check_index(&self, v: u64) -> Result<u8> {
        let size = 2 * self.n as u64 + 1;
        if v == 0 || v > size {
            return Err(self.err(format!(
                "index {v} out of range 1..={size} for n={}",
                self.n
            )));
        }
        Ok(v as u8)
    }

    fn parse_indices(&mut self) -> Result<(u8, u8)> {
        self.expect(b'[')?;
        let raw_i = self.parse_uint()?;
        let i = self.check_index(raw_i)?;
        self.expect(b',')?;
        let raw_j = self.parse_uint()?;
        let j = self.check_index(raw_j)?;
        self.expect(b']')?;
        Ok((i, j))
    }

    fn parse_generator(&mut self, name: &str) -> Result<Generator> {
        match name {
            "X" => Ok(Generator::dummy()),
            "J" => {
                let (i, j) = self.parse_indices()?;
                if i < j {
                    return Err(self.err(format!(
                        "J[{i},{j}] has positive grade; J[i,j] requires i >= j"
                    )));
                }
                Ok(Generator::j(i, j))
            }
            "Cur" => {
                let (i, j) = self.parse_indices()?;
                Ok(Generator::cur(i, j))
            }
            "PhiD" => {
                let (i, j) = self.parse_indices()?;
                if i >= j {
                    return Err(self.err(format!(
                        "PhiD[{i},{j}] requires i < j (strictly positive grade)"
                    )));
                }
                Ok(Generator::phi_d(i, j))
            }
            "Phi" => {
                let (i, j) = self.parse_indices()?;
                if i >= j {
                    return Err(self.err(format!("Phi[{i},{j}] requires i < j")));
                }
                Ok(Generator::phi_u(i, j))
            }
            other => Err(self.err(format!(
                "unknown symbol '{other}' (expected J, Cur, PhiD, Phi, X, S, NO, or k)"
            ))),
        }
    }

    fn parse_factor(&mut self) -> Result<Factor> {
        self.skip_ws();
        match self.peek() {
            Some(c) if c.is_ascii_digit() => {
                let num = self.parse_uint()?;
                self.skip_ws();
                let r = if self.peek() == Some(b'/') {
                    self.bump();
                    let den = self.parse_uint()?;
                    if den == 0 {
                        return Err(self.err("zero denominator"));
                    }
                    Rat::new(BigInt::from(num), BigInt::from(den))
                } else {
                    rat(num as i64)
                };
                Ok(Factor::Scalar(KPoly::constant(r)))
            }
            Some(b'(') => {
                self.bump();
                let inner = self.parse_expr()?;
                self.expect(b')')?;
                Ok(Factor::Term(inner))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.parse_ident();
                match name.as_str() {
                    "k" => {
                        self.skip_ws();
                        let p = if self.peek() == Some(b'^') {
                            self.bump();
                            self.parse_uint()? as u32
                        } else {
                            1
                        };
                        Ok(Factor::Scalar(KPoly::k_pow(rat(1), p)))
                    }
                    "S" => {
                        self.skip_ws();
                        let d = if self.peek() == Some(b'^') {
                            self.bump();
                            self.parse_uint()?
                        } else {
                            1
                        };
                        if d > 64 {
                            return Err(self.err("derivative order too large"));
                        }
                        self.expect(b'(')?;
                        let inner = self.parse_expr()?;
                        self.expect(b')')?;
                        let mut t = inner;
                        for _ in 0..d {
                            t = RawTerm::SDeriv(Box::new(t));
                        }
                        Ok(Factor::Term(t))
                    }
                    "NO" => {
                        self.expect(b'(')?;
                        let a = self.parse_expr()?;
                        self.expect(b',')?;
                        let b = self.parse_expr()?;
                        self.expect(b')')?;
                        Ok(Factor::Term(RawTerm::No(Box::new(a), Box::new(b))))
                    }
                    other => {
                        let g = self.parse_generator(other)?;
                        Ok(Factor::Term(RawTerm::Atom(DerivGen::plain(g))))
                    }
                }
            }
            Some(c) => Err(self.err(format!("unexpected character '{}'", c as char))),
            None => Err(self.err("unexpected end of input")),
        }
    }

    /// True when the upcoming character can start a factor (juxtaposition).
    fn at_factor_start(&mut self) -> bool {
        self.skip_ws();
        matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'(')
    }

    fn parse_term(&mut self) -> Result<RawTerm> {
        let mut scalar = KPoly::one();
        let mut raws: Vec<RawTerm> = Vec::new();
        loop {
            match self.parse_factor()? {
                Factor::Scalar(s) => scalar = scalar.mul(&s),
                Factor::Term(t) => raws.push(t),
            }
            self.skip_ws();
            if self.peek() == Some(b'*') {
                self.bump();
                continue;
            }
            if self.at_factor_start() {
                continue;
            }
            break;
        }
        let body = match raws.len() {
            0 => RawTerm::Scalar(KPoly::one()),
            _ => {
                let mut it = raws.into_iter().rev();
                let mut acc = it.next().unwrap();
                for t in it {
                    acc = RawTerm::No(Box::new(t), Box::new(acc));
                }
                acc
            }
        };
        if scalar == KPoly::one() {
            Ok(body)
        } else {
            Ok(RawTerm::Scaled(scalar, Box::new(body)))
        }
    }

    fn parse_expr(&mut self) -> Result<RawTerm> {
        let mut terms: Vec<RawTerm> = Vec::new();
        self.skip_ws();
        let mut neg = false;
        if self.peek() == Some(b'-') {
            self.bump();
            neg = true;
        } else if self.peek() == Some(b'+') {
            self.bump();
        }
        loop {
            let t = self.parse_term()?;
            terms.push(if neg {
                RawTerm::Scaled(KPoly::constant(rat(-1)), Box::new(t))
            } else {
                t
            });
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.bump();
                    neg = false;
                }
                Some(b'-') => {
                    self.bump();
                    neg = true;
                }
                _ => break,
            }
        }
        if terms.len() == 1 {
            Ok(terms.pop().unwrap())
        } else {
            Ok(RawTerm::Sum(terms))
        }
    }
}

/// Count dummy atoms that a fully expanded product of this term would carry.
fn dummy_count(t: &RawTerm) -> u32 {
    match t {
        RawTerm::Atom(dg) => u32::from(dg.g.fam == Family::Dummy),
        RawTerm::Scalar(_) => 0,
        RawTerm::No(a, b) => dummy_count(a) + dummy_count(b),
        RawTerm::SDeriv(a) | RawTerm::Scaled(_, a) => dummy_count(a),
        RawTerm::Sum(ts) => ts.iter().map(dummy_count).max().unwrap_or(0),
    }
}

/// Parse the text format into a raw term, checking index ranges against `n`
/// and rejecting products with more than one dummy factor.
pub fn parse(input: &str, n: u8) -> Result<RawTerm> {
    let mut p = Parser::new(input, n);
    let t = p.parse_expr()?;
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(p.err(format!("trailing input starting at '{}'", c as char)));
    }
    if dummy_count(&t) > 1 {
        return Err(p.err("at most one X factor may appear in a product"));
    }
    Ok(t)
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

fn gen_json(dg: &DerivGen) -> serde_json::Value {
    let name = match dg.g.fam {
        Family::Cur => "Cur",
        Family::PhiD => "PhiD",
        Family::PhiU => "Phi",
        Family::JGen => "J",
        Family::Dummy => "X",
    };
    serde_json::json!({
        "gen": name,
        "i": dg.g.a,
        "j": dg.g.b,
        "d": dg.d,
    })
}

/// Serialize an expression as a JSON array of terms.
pub fn expression_json(e: &Expression) -> serde_json::Value {
    let mut terms = Vec::new();
    for (mono, kp) in e.iter() {
        for (kpow, coeff) in kp.iter() {
            terms.push(serde_json::json!({
                "coeff": {
                    "num": coeff.numer().to_string(),
                    "den": coeff.denom().to_string(),
                    "kpow": kpow,
                },
                "word": mono.0.iter().map(gen_json).collect::<Vec<_>>(),
            }));
        }
    }
    serde_json::Value::Array(terms)
}

/// Serialize a family of W-algebra generators as one JSON document.
pub fn wset_json(n: u8, ws: &[(u8, Expression)]) -> serde_json::Value {
    serde_json::json!({
        "n": n,
        "generators": ws.iter().map(|(p, _)| format!("W_{p}")).collect::<Vec<_>>(),
        "W": ws.iter().map(|(p, e)| serde_json::json!({
            "p": p,
            "terms": expression_json(e),
        })).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Algebra;
    use crate::lca::{current_table, w_table_skeleton};
    use crate::liesuper::{principal_data, FormMode};
    use crate::ratio;

    fn complex_alg(n: u32) -> Algebra {
        let pd = principal_data(n, FormMode::Rescaled).unwrap();
        Algebra::new(current_table(&pd))
    }

    fn w_alg(n: u32) -> Algebra {
        let pd = principal_data(n, FormMode::Rescaled).unwrap();
        Algebra::new(w_table_skeleton(&pd))
    }

    #[test]
    fn prints_scalars_and_words() {
        let alg = w_alg(1);
        let e = Expression::zero();
        assert_eq!(print(&e), "0");
        let one = Expression::scalar(KPoly::one());
        assert_eq!(print(&one), "1");
        let t = alg.canonicalize(&parse("-3/2*k^2*J[1,1]S(J[3,3])X", 1).unwrap());
        assert_eq!(print(&t), "-3/2*k^2*J[1,1]S(J[3,3])X");
    }

    #[test]
    fn parses_whitespace_and_sums() {
        let alg = w_alg(1);
        let a = alg.canonicalize(&parse("J[2,1] + 2*J[1,1] - k*S(J[2,2])", 1).unwrap());
        let b = alg.canonicalize(&parse("2J[1,1]+J[2,1]-k S(J[2,2])", 1).unwrap());
        assert_eq!(a, b);
        assert_eq!(print(&a), "2*J[1,1] + J[2,1] - k*S(J[2,2])");
    }

    #[test]
    fn parses_no_nesting_and_reorders() {
        let alg = w_alg(1);
        // Diagonal superfields are odd and [J22, J11] = 0, so reordering
        // NO(J[2,2], J[1,1]) is a pure anticommutation.
        let a = alg.canonicalize(&parse("NO(J[2,2], J[1,1])", 1).unwrap());
        let b = alg.canonicalize(&parse("J[1,1]J[2,2]", 1).unwrap());
        assert_eq!(a, b.neg());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(parse("J[4,1]", 1).is_err());
        assert!(parse("J[1,2]", 1).is_err());
        assert!(parse("Phi[2,1]", 1).is_err());
        assert!(parse("PhiD[2,1]", 1).is_err());
        assert!(parse("Q[1,1]", 1).is_err());
        assert!(parse("J[1,1] +", 1).is_err());
        assert!(parse("J[1,1]]", 1).is_err());
        assert!(parse("X X", 1).is_err());
        let err = parse("J[1,1] + W", 1).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 1"), "{msg}");
    }

    #[test]
    fn round_trips_text_format() {
        use rand::SeedableRng;
        let alg = complex_alg(1);
        let walg = w_alg(1);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..500 {
            let (a, n) = if trial % 2 == 0 { (&alg, 1) } else { (&walg, 1) };
            let raw = crate::engine::suite::rand_raw(a, &mut rng, 3);
            let e = a.canonicalize(&raw);
            let s = print(&e);
            let back = a.canonicalize(&parse(&s, n).unwrap());
            assert_eq!(back, e, "round trip failed for '{s}'");
        }
    }

    #[test]
    fn scalar_multiplication_distributes() {
        let alg = w_alg(1);
        let a = alg.canonicalize(&parse("3*(J[1,1] + J[2,2])", 1).unwrap());
        let b = alg.canonicalize(&parse("3J[1,1] + 3J[2,2]", 1).unwrap());
        assert_eq!(a, b);
        let c = alg.canonicalize(&parse("1/2*k*J[1,1] + 1/2*k*J[1,1]", 1).unwrap());
        let d = alg.canonicalize(&parse("k*J[1,1]", 1).unwrap());
        assert_eq!(c, d);
        let half = alg.canonicalize(&parse("1/2", 1).unwrap());
        assert_eq!(
            half,
            Expression::scalar(KPoly::constant(ratio(1, 2)))
        );
    }

    #[test]
    fn json_shape() {
        let alg = w_alg(1);
        let e = alg.canonicalize(&parse("-3/2*k^2*J[1,1]X", 1).unwrap());
        let v = expression_json(&e);
        let terms = v.as_array().unwrap();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0]["coeff"]["num"], "-3");
        assert_eq!(terms[0]["coeff"]["den"], "2");
        assert_eq!(terms[0]["coeff"]["kpow"], 2);
        assert_eq!(terms[0]["word"][0]["gen"], "J");
        assert_eq!(terms[0]["word"][1]["gen"], "X");
        let doc = wset_json(1, &[(3, e)]);
        assert_eq!(doc["n"], 1);
        assert_eq!(doc["generators"][0], "W_3");
        assert_eq!(doc["W"][0]["p"], 3);
    }

    #[test]
    fn sector_inference() {
        let w = w_alg(1).canonicalize(&parse("J[1,1]X", 1).unwrap());
        assert_eq!(infer_sector(&w).unwrap(), Some(Sector::WAlgebra));
        let c = complex_alg(1).canonicalize(&parse("Cur[1,2]PhiD[1,2]", 1).unwrap());
        assert_eq!(infer_sector(&c).unwrap(), Some(Sector::Complex));
        let p = complex_alg(1).canonicalize(&parse("Phi[1,2]", 1).unwrap());
        assert_eq!(infer_sector(&p).unwrap(), None);
    }
}

//! The line-based election file format.
//!
//! A file is one header line of `key=value` pairs followed by the ballots,
//! one per line (binary votes may also share a line). Example headers:
//!
//! ```text
//! kind=binary sigma=0.2
//! kind=ordinal alts=r,a,b reality=r
//! kind=parameter r=1.5 sigma=0.1
//! ```
//!
//! Shares and margins parse as exact rationals: `sigma=0.05` means 1/20.
//! The optional `sybils=k` key marks the last `k` ballots as cast by known
//! sybils, which single-instance audits need; rules themselves never see it.

use std::fmt;

use sybilvote::{
    AltId, AlternativeSet, BinaryProfile, BinaryVote, Delta, OrdinalProfile, ParameterProfile,
    Rational, SigmaBound,
};

/// A parsed election file: the profile plus its header parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct ElectionDoc {
    pub election: Election,
    pub sigma: Option<SigmaBound>,
    pub delta: Option<Delta>,
    /// Trailing ballots cast by known sybils.
    pub sybils: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Election {
    Binary(BinaryProfile),
    Ordinal(OrdinalProfile),
    Parameter(ParameterProfile),
}

impl Election {
    pub fn kind(&self) -> &'static str {
        match self {
            Election::Binary(_) => "binary",
            Election::Ordinal(_) => "ordinal",
            Election::Parameter(_) => "parameter",
        }
    }

    pub fn ballots(&self) -> u64 {
        match self {
            Election::Binary(p) => p.len(),
            Election::Ordinal(p) => p.len(),
            Election::Parameter(p) => p.len(),
        }
    }
}

impl ElectionDoc {
    /// The margin a decision should use when none is forced explicitly:
    /// the header delta, else half the header sigma, else zero.
    pub fn default_delta(&self) -> Delta {
        match (self.delta, self.sigma) {
            (Some(d), _) => d,
            (None, Some(s)) => sybilvote::min_safe_delta(s),
            (None, None) => Delta::zero(),
        }
    }
}

/// Parse failure, pointing at the 1-based offending line.
#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

struct Header {
    line: usize,
    kind: String,
    sigma: Option<SigmaBound>,
    delta: Option<Delta>,
    sybils: Option<u64>,
    alts: Option<Vec<AltId>>,
    reality: Option<AltId>,
    r: Option<Rational>,
}

fn parse_header(line_no: usize, line: &str) -> Result<Header, ParseError> {
    let mut kind = None;
    let mut version = None;
    let mut sigma = None;
    let mut delta = None;
    let mut sybils = None;
    let mut alts = None;
    let mut reality = None;
    let mut r = None;
    for token in line.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| ParseError::at(line_no, format!("expected key=value, got '{token}'")))?;
        let slot_taken = match key {
            "v" => version.replace(value.to_string()).is_some(),
            "kind" => kind.replace(value.to_string()).is_some(),
            "sigma" => sigma
                .replace(value.parse::<SigmaBound>().map_err(|e| {
                    ParseError::at(line_no, format!("bad sigma: {e}"))
                })?)
                .is_some(),
            "delta" => delta
                .replace(value.parse::<Delta>().map_err(|e| {
                    ParseError::at(line_no, format!("bad delta: {e}"))
                })?)
                .is_some(),
            "sybils" => sybils
                .replace(value.parse::<u64>().map_err(|_| {
                    ParseError::at(line_no, format!("bad sybil count '{value}'"))
                })?)
                .is_some(),
            "alts" => alts
                .replace(value.split(',').map(AltId::from).collect::<Vec<_>>())
                .is_some(),
            "reality" => reality.replace(AltId::from(value)).is_some(),
            "r" => r
                .replace(value.parse::<Rational>().map_err(|e| {
                    ParseError::at(line_no, format!("bad current value: {e}"))
                })?)
                .is_some(),
            other => return Err(ParseError::at(line_no, format!("unknown header key '{other}'"))),
        };
        if slot_taken {
            return Err(ParseError::at(line_no, format!("duplicate header key '{key}'")));
        }
    }
    if let Some(v) = version {
        if v != "1" {
            return Err(ParseError::at(line_no, format!("unsupported format version '{v}'")));
        }
    }
    let kind = kind.ok_or_else(|| ParseError::at(line_no, "header is missing kind="))?;
    Ok(Header {
        line: line_no,
        kind,
        sigma,
        delta,
        sybils,
        alts,
        reality,
        r,
    })
}

fn forbid(
    header: &Header,
    present: bool,
    key: &str,
) -> Result<(), ParseError> {
    if present {
        return Err(ParseError::at(
            header.line,
            format!("{key}= does not apply to kind={}", header.kind),
        ));
    }
    Ok(())
}

/// Parses the full text of an election file.
pub fn parse_election(text: &str) -> Result<ElectionDoc, ParseError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (header_line, header_text) = lines
        .next()
        .ok_or_else(|| ParseError::at(1, "empty file"))?;
    let header = parse_header(header_line, header_text)?;
    let body: Vec<(usize, &str)> = lines.collect();
    if body.is_empty() {
        return Err(ParseError::at(header.line, "no ballots"));
    }

    let election = match header.kind.as_str() {
        "binary" => {
            forbid(&header, header.alts.is_some(), "alts")?;
            forbid(&header, header.reality.is_some(), "reality")?;
            forbid(&header, header.r.is_some(), "r")?;
            parse_binary_body(&body)?
        }
        "ordinal" => {
            forbid(&header, header.r.is_some(), "r")?;
            let alt_ids = header
                .alts
                .clone()
                .ok_or_else(|| ParseError::at(header.line, "kind=ordinal needs alts="))?;
            let reality = header
                .reality
                .clone()
                .ok_or_else(|| ParseError::at(header.line, "kind=ordinal needs reality="))?;
            let alts = AlternativeSet::new(alt_ids, &reality)
                .map_err(|e| ParseError::at(header.line, e.to_string()))?;
            parse_ordinal_body(alts, &body)?
        }
        "parameter" => {
            forbid(&header, header.alts.is_some(), "alts")?;
            forbid(&header, header.reality.is_some(), "reality")?;
            let r = header
                .r
                .ok_or_else(|| ParseError::at(header.line, "kind=parameter needs r="))?;
            parse_parameter_body(r, &body)?
        }
        other => {
            return Err(ParseError::at(
                header.line,
                format!("unknown kind '{other}' (expected binary, ordinal, or parameter)"),
            ))
        }
    };

    if let Some(s) = header.sybils {
        if s > election.ballots() {
            return Err(ParseError::at(
                header.line,
                format!("sybils={s} exceeds the {} ballots", election.ballots()),
            ));
        }
    }
    Ok(ElectionDoc {
        election,
        sigma: header.sigma,
        delta: header.delta,
        sybils: header.sybils,
    })
}

fn parse_binary_body(body: &[(usize, &str)]) -> Result<Election, ParseError> {
    let mut votes = Vec::new();
    for (no, line) in body {
        for token in line.split_whitespace() {
            votes.push(match token {
                "p" => BinaryVote::Proposal,
                "r" => BinaryVote::Reality,
                other => {
                    return Err(ParseError::at(
                        *no,
                        format!("unknown vote '{other}' (expected p or r)"),
                    ))
                }
            });
        }
    }
    Ok(Election::Binary(BinaryProfile::new(votes)))
}

fn parse_ordinal_body(alts: AlternativeSet, body: &[(usize, &str)]) -> Result<Election, ParseError> {
    let m = alts.len();
    let mut rankings = Vec::with_capacity(body.len());
    for (no, line) in body {
        let mut ranking = Vec::with_capacity(m);
        let mut seen = vec![false; m];
        for id in line.split(',') {
            let id = AltId::from(id.trim());
            let idx = alts.index_of(&id).ok_or_else(|| {
                ParseError::at(*no, format!("unknown alternative '{id}'"))
            })?;
            if seen[idx] {
                return Err(ParseError::at(*no, format!("alternative '{id}' listed twice")));
            }
            seen[idx] = true;
            ranking.push(idx);
        }
        if ranking.len() != m {
            return Err(ParseError::at(
                *no,
                format!("ranking lists {} of {m} alternatives", ranking.len()),
            ));
        }
        rankings.push(ranking);
    }
    let profile = OrdinalProfile::from_index_ballots(alts, rankings)
        .expect("rankings validated line by line");
    Ok(Election::Ordinal(profile))
}

fn parse_parameter_body(r: Rational, body: &[(usize, &str)]) -> Result<Election, ParseError> {
    let mut ideals = Vec::with_capacity(body.len());
    for (no, line) in body {
        let v: Rational = line
            .parse()
            .map_err(|e| ParseError::at(*no, format!("bad ideal point: {e}")))?;
        ideals.push(v);
    }
    Ok(Election::Parameter(ParameterProfile::new(r, ideals)))
}

/// Writes a document back out in canonical form: full header, one ballot
/// per line, rationals in lowest terms. Parsing the result reproduces the
/// document exactly.
pub fn serialize_election(doc: &ElectionDoc) -> String {
    let mut header = vec![format!("v=1"), format!("kind={}", doc.election.kind())];
    match &doc.election {
        Election::Binary(_) => {}
        Election::Ordinal(p) => {
            let alts = p.alternatives();
            let ids: Vec<&str> = alts.ids().iter().map(|a| a.0.as_str()).collect();
            header.push(format!("alts={}", ids.join(",")));
            header.push(format!("reality={}", alts.reality_id()));
        }
        Election::Parameter(p) => header.push(format!("r={}", p.reality)),
    }
    if let Some(s) = doc.sigma {
        header.push(format!("sigma={s}"));
    }
    if let Some(d) = doc.delta {
        header.push(format!("delta={d}"));
    }
    if let Some(k) = doc.sybils {
        header.push(format!("sybils={k}"));
    }
    let mut out = header.join(" ");
    out.push('\n');
    match &doc.election {
        Election::Binary(p) => {
            for v in p.votes() {
                out.push_str(match v {
                    BinaryVote::Proposal => "p\n",
                    BinaryVote::Reality => "r\n",
                });
            }
        }
        Election::Ordinal(p) => {
            let alts = p.alternatives();
            for ranking in p.rankings() {
                let ids: Vec<&str> = ranking.iter().map(|&i| alts.id(i).0.as_str()).collect();
                out.push_str(&ids.join(","));
                out.push('\n');
            }
        }
        Election::Parameter(p) => {
            for v in &p.ideals {
                out.push_str(&v.to_string());
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> ElectionDoc {
        parse_election(s).unwrap()
    }

    fn err(s: &str) -> ParseError {
        parse_election(s).unwrap_err()
    }

    #[test]
    fn binary_header_example() {
        let doc = parse("kind=binary sigma=0.2\np p p r\n");
        match &doc.election {
            Election::Binary(p) => {
                assert_eq!(p.len(), 4);
                assert_eq!(p.proposal_count(), 3);
            }
            other => panic!("wrong kind: {other:?}"),
        }
        assert_eq!(doc.sigma.unwrap().value(), Rational::new(1, 5).unwrap());
        // Delta defaults to half the sigma.
        assert_eq!(doc.default_delta().value(), Rational::new(1, 10).unwrap());
    }

    #[test]
    fn ordinal_header_example() {
        let doc = parse("kind=ordinal reality=r alts=r,a,b\na,r,b\n");
        match &doc.election {
            Election::Ordinal(p) => {
                assert_eq!(p.len(), 1);
                assert_eq!(p.alternatives().reality_id(), &AltId::reality());
            }
            other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn parameter_header_example() {
        let doc = parse("kind=parameter r=1.5 sigma=0.1\n2.0\n0.5\n");
        match &doc.election {
            Election::Parameter(p) => {
                assert_eq!(p.reality, Rational::new(3, 2).unwrap());
                assert_eq!(p.ideals.len(), 2);
            }
            other => panic!("wrong kind: {other:?}"),
        }
    }

    #[test]
    fn binary_votes_allow_one_per_line_too() {
        let doc = parse("kind=binary\np\nr\np\n");
        assert_eq!(doc.election.ballots(), 3);
        assert_eq!(doc.default_delta(), Delta::zero());
    }

    #[test]
    fn errors_carry_line_numbers() {
        assert_eq!(err("kind=binary\np\nx\n").line, 3);
        assert_eq!(err("kind=ordinal alts=r,a reality=r\na,r\nb,a\n").line, 3);
        assert_eq!(err("kind=ordinal alts=r,a reality=r\na,a\n").line, 2);
        assert_eq!(err("kind=ordinal alts=r,a reality=r\na\n").line, 2);
        assert_eq!(err("kind=parameter r=0\n1\nhuh\n").line, 3);
    }

    #[test]
    fn header_mistakes_are_rejected() {
        assert!(err("p p\n").message.contains("key=value"));
        assert!(err("kind=binary delta=0.6\np\n").message.contains("bad delta"));
        assert!(err("kind=binary kind=binary\np\n").message.contains("duplicate"));
        assert!(err("kind=ordinal alts=r,a\na,r\n").message.contains("reality="));
        assert!(err("kind=parameter\n1\n").message.contains("r="));
        assert!(err("kind=binary r=1\np\n").message.contains("does not apply"));
        assert!(err("v=2 kind=binary\np\n").message.contains("version"));
        assert!(err("kind=binary sybils=3\np p\n").message.contains("exceeds"));
        assert!(err("").message.contains("empty"));
        assert!(err("kind=binary\n").message.contains("no ballots"));
    }

    #[test]
    fn round_trip_is_identity() {
        let samples = [
            "kind=binary sigma=0.2\np p p r\n",
            "kind=binary delta=1/6 sybils=1\np\nr\nr\n",
            "kind=ordinal reality=r alts=r,a,b sigma=1/4\na,r,b\nb,a,r\n",
            "kind=parameter r=1.5 sigma=0.1\n2.0\n0.5\n",
            "kind=parameter r=-2\n-0.5\n3\n",
        ];
        for s in samples {
            let doc = parse(s);
            let text = serialize_election(&doc);
            assert_eq!(parse(&text), doc, "through {text:?}");
            // Canonical form is a fixed point.
            assert_eq!(serialize_election(&parse(&text)), text);
        }
    }
}

//! Reading and writing TSPLIB95 files.
//!
//! Supported instance files are symmetric `TSP` problems with
//! `EDGE_WEIGHT_TYPE` of `EUC_2D`, `ATT` or `EXPLICIT` (the latter in
//! `FULL_MATRIX`, `UPPER_ROW` or `LOWER_DIAG_ROW` format). City numbers in
//! files are 1-based; everything returned here is 0-based.

use std::fmt::Write as _;

use crate::error::{ParseError, ParseErrorKind, TourError};
use crate::instance::{TspInstance, WeightKind};
use crate::tour::Tour;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MatrixFormat {
    FullMatrix,
    UpperRow,
    LowerDiagRow,
}

impl MatrixFormat {
    fn entries(self, n: usize) -> usize {
        match self {
            MatrixFormat::FullMatrix => n * n,
            MatrixFormat::UpperRow => n * (n - 1) / 2,
            MatrixFormat::LowerDiagRow => n * (n + 1) / 2,
        }
    }
}

/// One non-blank line with its 1-based number.
#[derive(Clone, Copy)]
struct Line<'a> {
    no: usize,
    text: &'a str,
}

impl<'a> Line<'a> {
    fn starts_keyword(&self) -> bool {
        self.text.trim_start().starts_with(|c: char| c.is_ascii_alphabetic())
    }

    fn tokens(&self) -> impl Iterator<Item = &'a str> {
        self.text.split_whitespace()
    }
}

struct Lines<'a> {
    inner: std::iter::Peekable<Box<dyn Iterator<Item = Line<'a>> + 'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let it: Box<dyn Iterator<Item = Line<'a>> + 'a> = Box::new(
            text.lines()
                .enumerate()
                .map(|(i, t)| Line { no: i + 1, text: t })
                .filter(|l| !l.text.trim().is_empty()),
        );
        Self { inner: it.peekable(), last: text.lines().count().max(1) }
    }

    fn next(&mut self) -> Option<Line<'a>> {
        self.inner.next()
    }

    /// Consumes data lines up to (not including) the next keyword line.
    fn section(&mut self) -> Vec<Line<'a>> {
        let mut out = Vec::new();
        while let Some(line) = self.inner.peek() {
            if line.starts_keyword() {
                break;
            }
            out.push(*line);
            self.inner.next();
        }
        out
    }
}

fn split_header(line: &str) -> (&str, Option<&str>) {
    match line.split_once(':') {
        Some((k, v)) => (k.trim(), Some(v.trim())),
        None => (line.trim(), None),
    }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize) -> Result<T, ParseError> {
    tok.parse().map_err(|_| ParseError::new(line, ParseErrorKind::NotANumber(tok.to_string())))
}

#[derive(Default)]
struct Header {
    name: Option<String>,
    dimension: Option<usize>,
    weight_kind: Option<WeightKind>,
    format: Option<MatrixFormat>,
}

impl Header {
    fn dimension(&self, line: usize) -> Result<usize, ParseError> {
        self.dimension.ok_or_else(|| ParseError::new(line, ParseErrorKind::Missing("DIMENSION")))
    }
}

/// Parses a TSPLIB instance file.
pub fn parse_instance(text: &str) -> Result<TspInstance, ParseError> {
    let mut lines = Lines::new(text);
    let mut header = Header::default();
    let mut coords: Option<Vec<(f64, f64)>> = None;
    let mut weights: Option<(Vec<u64>, usize)> = None;

    while let Some(line) = lines.next() {
        let (key, value) = split_header(line.text);
        match (key, value) {
            ("NAME", Some(v)) => header.name = Some(v.to_string()),
            ("TYPE", Some(v)) => {
                if v != "TSP" {
                    return Err(unsupported(line.no, "TYPE", v));
                }
            }
            ("DIMENSION", Some(v)) => {
                let n: usize = parse_num(v, line.no)?;
                header.dimension = Some(n);
            }
            ("EDGE_WEIGHT_TYPE", Some(v)) => {
                header.weight_kind = Some(match v {
                    "EUC_2D" => WeightKind::Euc2d,
                    "ATT" => WeightKind::Att,
                    "EXPLICIT" => WeightKind::Explicit,
                    _ => return Err(unsupported(line.no, "EDGE_WEIGHT_TYPE", v)),
                })
            }
            ("EDGE_WEIGHT_FORMAT", Some(v)) => {
                header.format = Some(match v {
                    "FULL_MATRIX" => MatrixFormat::FullMatrix,
                    "UPPER_ROW" => MatrixFormat::UpperRow,
                    "LOWER_DIAG_ROW" => MatrixFormat::LowerDiagRow,
                    _ => return Err(unsupported(line.no, "EDGE_WEIGHT_FORMAT", v)),
                })
            }
            ("NODE_COORD_TYPE", Some(v)) => {
                if v != "TWOD_COORDS" {
                    return Err(unsupported(line.no, "NODE_COORD_TYPE", v));
                }
            }
            ("NODE_COORD_SECTION", _) => {
                let n = header.dimension(line.no)?;
                coords = Some(read_coords(n, line, lines.section())?);
            }
            ("EDGE_WEIGHT_SECTION", _) => {
                let n = header.dimension(line.no)?;
                let format = header
                    .format
                    .ok_or_else(|| ParseError::new(line.no, ParseErrorKind::Missing("EDGE_WEIGHT_FORMAT")))?;
                weights = Some((read_weights(format.entries(n), line, lines.section())?, line.no));
            }
            ("DISPLAY_DATA_SECTION", _) => {
                lines.section();
            }
            ("EOF", None) => break,
            (_, Some(_)) => {}
            (_, None) => {
                return Err(ParseError::new(line.no, ParseErrorKind::MalformedHeader(line.text.trim().to_string())))
            }
        }
    }

    let end = lines.last;
    let n = header.dimension(end)?;
    let name = header.name.unwrap_or_default();
    let kind = header
        .weight_kind
        .ok_or_else(|| ParseError::new(end, ParseErrorKind::Missing("EDGE_WEIGHT_TYPE")))?;
    match kind {
        WeightKind::Euc2d | WeightKind::Att => {
            let coords = coords.ok_or_else(|| ParseError::new(end, ParseErrorKind::Missing("NODE_COORD_SECTION")))?;
            TspInstance::from_coords(name, kind, coords).map_err(|e| ParseError::new(end, e))
        }
        WeightKind::Explicit => {
            let (flat, at) =
                weights.ok_or_else(|| ParseError::new(end, ParseErrorKind::Missing("EDGE_WEIGHT_SECTION")))?;
            let format = header.format.expect("checked when the section was read");
            let matrix = expand_matrix(n, format, &flat);
            TspInstance::from_matrix(name, matrix).map_err(|e| ParseError::new(at, e))
        }
    }
}

fn unsupported(line: usize, field: &'static str, value: &str) -> ParseError {
    ParseError::new(line, ParseErrorKind::Unsupported { field, value: value.to_string() })
}

fn read_coords(n: usize, start: Line<'_>, data: Vec<Line<'_>>) -> Result<Vec<(f64, f64)>, ParseError> {
    let mut coords: Vec<Option<(f64, f64)>> = vec![None; n];
    for line in &data {
        let toks: Vec<&str> = line.tokens().collect();
        if toks.len() != 3 {
            return Err(ParseError::new(
                line.no,
                ParseErrorKind::MalformedHeader(format!("expected `id x y`, got {:?}", line.text.trim())),
            ));
        }
        let id: i64 = parse_num(toks[0], line.no)?;
        let x: f64 = parse_num(toks[1], line.no)?;
        let y: f64 = parse_num(toks[2], line.no)?;
        let slot = usize::try_from(id)
            .ok()
            .filter(|&i| (1..=n).contains(&i))
            .map(|i| i - 1)
            .filter(|&i| coords[i].is_none())
            .ok_or_else(|| {
                if data.len() > n {
                    ParseError::new(line.no, ParseErrorKind::DimensionMismatch { expected: n, found: data.len() })
                } else {
                    ParseError::new(line.no, ParseErrorKind::BadNodeId(id))
                }
            })?;
        coords[slot] = Some((x, y));
    }
    if data.len() != n {
        let at = data.last().map_or(start.no, |l| l.no);
        return Err(ParseError::new(at, ParseErrorKind::DimensionMismatch { expected: n, found: data.len() }));
    }
    Ok(coords.into_iter().map(|c| c.expect("all ids seen")).collect())
}

fn read_weights(expected: usize, start: Line<'_>, data: Vec<Line<'_>>) -> Result<Vec<u64>, ParseError> {
    let mut out = Vec::with_capacity(expected);
    for line in &data {
        for tok in line.tokens() {
            out.push(parse_num(tok, line.no)?);
        }
    }
    if out.len() != expected {
        let at = data.last().map_or(start.no, |l| l.no);
        return Err(ParseError::new(at, ParseErrorKind::DimensionMismatch { expected, found: out.len() }));
    }
    Ok(out)
}

fn expand_matrix(n: usize, format: MatrixFormat, flat: &[u64]) -> Vec<Vec<u64>> {
    let mut m = vec![vec![0u64; n]; n];
    let mut it = flat.iter().copied();
    match format {
        MatrixFormat::FullMatrix => {
            for row in m.iter_mut() {
                for cell in row.iter_mut() {
                    *cell = it.next().unwrap();
                }
            }
        }
        MatrixFormat::UpperRow => {
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = it.next().unwrap();
                    m[i][j] = d;
                    m[j][i] = d;
                }
            }
        }
        MatrixFormat::LowerDiagRow => {
            for i in 0..n {
                for j in 0..=i {
                    let d = it.next().unwrap();
                    m[i][j] = d;
                    m[j][i] = d;
                }
            }
        }
    }
    m
}

/// Parses a TSPLIB `.tour` file into a 0-based tour.
///
/// When the file declares a `DIMENSION`, the tour must be a permutation of
/// exactly that many cities.
pub fn parse_tour(text: &str) -> Result<Tour, ParseError> {
    let mut lines = Lines::new(text);
    let mut dimension: Option<usize> = None;
    let mut cities: Option<(Vec<usize>, usize)> = None;

    while let Some(line) = lines.next() {
        let (key, value) = split_header(line.text);
        match (key, value) {
            ("TYPE", Some(v)) => {
                if v != "TOUR" {
                    return Err(unsupported(line.no, "TYPE", v));
                }
            }
            ("DIMENSION", Some(v)) => dimension = Some(parse_num(v, line.no)?),
            ("TOUR_SECTION", _) => {
                let mut order = Vec::new();
                let mut terminated = false;
                'section: for data in lines.section() {
                    for tok in data.tokens() {
                        let city: i64 = parse_num(tok, data.no)?;
                        if city == -1 {
                            terminated = true;
                            break 'section;
                        }
                        if city < 1 {
                            return Err(ParseError::new(data.no, TourError::OutOfRange(city.max(0) as usize)));
                        }
                        order.push(city as usize - 1);
                    }
                }
                if !terminated {
                    // TOUR_SECTION may also end at EOF without the -1 sentinel.
                    lines.section();
                }
                cities = Some((order, line.no));
            }
            ("EOF", None) => break,
            (_, Some(_)) => {}
            (_, None) => {
                return Err(ParseError::new(line.no, ParseErrorKind::MalformedHeader(line.text.trim().to_string())))
            }
        }
    }

    let (order, at) = cities.ok_or_else(|| ParseError::new(lines.last, ParseErrorKind::Missing("TOUR_SECTION")))?;
    let n = dimension.unwrap_or(order.len());
    Tour::with_len(order, n).map_err(|e| ParseError::new(at, e))
}

/// Renders a tour in TSPLIB `.tour` format with 1-based city numbers.
pub fn write_tour(tour: &Tour, name: &str) -> String {
    let mut out = String::with_capacity(16 + tour.len() * 5);
    let _ = writeln!(out, "NAME : {name}");
    out.push_str("TYPE : TOUR\n");
    let _ = writeln!(out, "DIMENSION : {}", tour.len());
    out.push_str("TOUR_SECTION\n");
    for &c in tour.iter() {
        let _ = writeln!(out, "{}", c + 1);
    }
    out.push_str("-1\nEOF\n");
    out
}

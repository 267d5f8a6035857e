//! Small end-to-end checks against values known in closed form.

use std::fmt::Write as _;

use coarsekit::corpus::{corpus, corpus_map, MAP_NAMES};
use coarsekit::groups::{word_ball, Group, BALL_CAP};
use coarsekit::light::{factorize, light_mesh, n_to_1_response};
use coarsekit::{components_at, Extended, FiniteMetricSpace, Rational64};

use crate::error::{CliError, Result};

type Q = Rational64;

fn q(v: i64) -> Q {
    Q::from_integer(v)
}

fn checks() -> Vec<(&'static str, bool)> {
    let mut out = Vec::new();

    let window = FiniteMetricSpace::<Q>::integer_set(&[0, 1, 2, 5, 6, 10]);
    let all: Vec<usize> = (0..window.len()).collect();
    out.push(("components", components_at(&window, &all, q(1)).len() == 3));

    let id = corpus_map("identity", 12).expect("builtin");
    out.push(("identity_light", light_mesh(&id, q(1), q(2)) == Extended::Finite(q(4))));

    let constant = corpus_map("constant", 10).expect("builtin");
    out.push((
        "constant_n_to_1",
        n_to_1_response(&constant, q(0), 2, q(20)).value == Some(q(5)),
    ));

    let factorized = MAP_NAMES.iter().all(|name| {
        let f = corpus_map(name, 8).expect("builtin");
        let fact = factorize(&f, 4);
        fact.e.then(&fact.f_prime).map(|g| g.values() == f.values()).unwrap_or(false)
    });
    out.push(("factorization", factorized));

    let ball = word_ball::<Q>(&Group::Zn(2), 3, BALL_CAP).expect("small ball");
    out.push(("z2_ball", ball.len() == 25 && ball.space.diameter() == Extended::Finite(q(6))));

    let lamp = corpus("lamplighter_to_Z").and_then(|e| e.at_window(5));
    out.push(("lamplighter_window", lamp.map(|f| f.domain().len() == 84).unwrap_or(false)));

    out
}

pub fn run() -> Result<String> {
    let results = checks();
    let mut text = String::new();
    for (name, ok) in &results {
        let _ = writeln!(text, "{} {name}", if *ok { "PASS" } else { "FAIL" });
    }
    if results.iter().all(|(_, ok)| *ok) {
        Ok(text)
    } else {
        print!("{text}");
        Err(CliError::SelftestFailed)
    }
}

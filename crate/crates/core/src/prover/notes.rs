//! Fixed commentary carried in every certificate.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Note {
    pub id: String,
    pub published: String,
    pub resolution: String,
}

fn note(id: &str, published: &str, resolution: &str) -> Note {
    Note {
        id: id.into(),
        published: published.into(),
        resolution: resolution.into(),
    }
}

pub fn resolved_typos() -> Vec<Note> {
    vec![
        note(
            "gamma3_coefficient",
            "ln|Γ₃| > −4.35·10⁴⁸ (1+ln n)³",
            "The product of the Matveev factors is about 4.35·10⁴⁰. The published value is a \
             valid but weaker bound; the published chain carries it forward and the tight chain \
             uses the computed value.",
        ),
        note(
            "log_one_plus_log",
            "−8.58·10¹³ log(1+log n) in the bound on ln|Γ₂|",
            "Read as (1+log n); the height of the second form grows with (1+ln n) and the \
             following steps use that form.",
        ),
        note(
            "alpha_half_exponent",
            "9α^(n/2) + 9 < 10 in the transfer from Γ₃ to Λ₃",
            "Read as α^(−n/2); with a positive exponent the inequality is false, with the \
             negative one it holds throughout n ≥ 561.",
        ),
        note(
            "guzman_luca_form",
            "n < 15.6·10⁴⁸ (1+ln n)³ turned into n < 2·10⁵⁶",
            "The Guzmán–Luca lemma is stated for x < H (ln x)ʳ; the bound X₀ is instead \
             certified directly by checking H (1+ln X₀)³ < X₀, which with monotonicity \
             gives n < X₀.",
        ),
    ]
}

pub fn open_questions() -> Vec<Note> {
    vec![
        note(
            "growth_bracket_n3",
            "α^(n−3) ≤ P_n ≤ α^(n−1) for all n ≥ 1",
            "False at n = 3, where P₃ = 2 > α² ≈ 1.755. Every other index up to the checked \
             range satisfies it, and the analytic argument only uses n ≥ 561.",
        ),
        note(
            "lambda3_sign",
            "Λ₃ built from a·10^(l+m) − (a−b)·10^m − (b−c)",
            "The (b−c) term enters with a minus sign. Round 3 runs under that sign; the \
             paper-faithful mode runs the opposite sign as well.",
        ),
        note(
            "convergent_indexing",
            "q₁₂₁, q₁₂₄, q₁₂₅ as the denominators of the three rounds",
            "Located by value in the certified expansion of ln α / ln 10. With a₀ = 0 counted \
             as index 0 the indices coincide.",
        ),
        note(
            "convergent_fallback",
            "one convergent per round",
            "Under the round-2 convergent the combination (a, b, l) = (5, 4, 33) fails the \
             ‖qψ‖ test, and a few dozen round-3 combinations fail under theirs. Each is reduced \
             by another convergent above X₀ with a smaller bound, so the round bounds are \
             unchanged.",
        ),
        note(
            "nonvanishing",
            "Γ_i ≠ 0 via the automorphism α ↦ β",
            "Γ_i = 0 would force |C_β βⁿ| to equal a number above 1. The certificate records \
             certified |C_β| < 1 and |β| < 1, which rule this out.",
        ),
    ]
}

//! Direct re-implementations used as oracles. Everything here works from
//! raw token lists and recomputes term frequencies term by term, without
//! the index or the library's metric code.

#![allow(dead_code)]

use rand::prelude::*;

pub fn bias(rank: usize, base: f64) -> f64 {
    base.ln() / ((rank + 1) as f64).ln()
}

pub fn tf(term: &str, tokens: &[String]) -> usize {
    tokens.iter().filter(|t| t.as_str() == term).count()
}

/// Sum over the group's terms of each term's frequency.
pub fn magnitude(group: &[String], tokens: &[String]) -> usize {
    group.iter().map(|t| tf(t, tokens)).sum()
}

pub fn omega(groups: &[Vec<String>], target: &[f64], tau: usize, tokens: &[String]) -> f64 {
    let mags: Vec<usize> = groups.iter().map(|g| magnitude(g, tokens)).collect();
    let total: usize = mags.iter().sum();
    if total <= tau {
        return 1.0;
    }
    let mut gap = 0.0;
    for (m, j) in mags.iter().zip(target) {
        gap += (*m as f64 / total as f64 - j).abs();
    }
    1.0 - gap
}

pub struct Oracle<'a> {
    pub groups: &'a [Vec<String>],
    pub target: &'a [f64],
    pub tau: usize,
    pub base: f64,
    pub k: usize,
}

impl Oracle<'_> {
    fn top<'d>(&self, ranked: &'d [Vec<String>]) -> &'d [Vec<String>] {
        &ranked[..ranked.len().min(self.k)]
    }

    pub fn fairr(&self, ranked: &[Vec<String>]) -> f64 {
        let mut s = 0.0;
        for (i, d) in self.top(ranked).iter().enumerate() {
            s += omega(self.groups, self.target, self.tau, d) * bias(i + 1, self.base);
        }
        s
    }

    pub fn ifairr(&self, background: &[Vec<String>]) -> f64 {
        let mut scores: Vec<f64> = background
            .iter()
            .map(|d| omega(self.groups, self.target, self.tau, d))
            .collect();
        scores.sort_by(|a, b| b.partial_cmp(a).unwrap());
        let mut s = 0.0;
        for (i, w) in scores.iter().take(self.k).enumerate() {
            s += w * bias(i + 1, self.base);
        }
        s
    }

    /// Exposure of one group: sum over its terms of each term's exposure.
    pub fn te(&self, ranked: &[Vec<String>], group: usize) -> f64 {
        let mut total = 0.0;
        for term in &self.groups[group] {
            let mut term_exposure = 0.0;
            for (i, d) in self.top(ranked).iter().enumerate() {
                if d.is_empty() {
                    continue;
                }
                term_exposure += tf(term, d) as f64 / d.len() as f64 * bias(i + 1, self.base);
            }
            total += term_exposure;
        }
        total
    }

    pub fn representation(&self, ranked: &[Vec<String>]) -> Option<Vec<f64>> {
        let te: Vec<f64> = (0..self.groups.len()).map(|g| self.te(ranked, g)).collect();
        let total: f64 = te.iter().sum();
        if total == 0.0 {
            None
        } else {
            Some(te.iter().map(|e| e / total).collect())
        }
    }

    pub fn rbdf(&self, ranked: &[Vec<String>]) -> Option<f64> {
        let top = self.top(ranked);
        if top.is_empty() {
            return None;
        }
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, d) in top.iter().enumerate() {
            let representative = self.groups.iter().any(|g| magnitude(g, d) > 0);
            if representative {
                num += bias(i + 1, self.base);
            }
            den += bias(i + 1, self.base);
        }
        Some(num / den)
    }

    pub fn ted(&self, ranked: &[Vec<String>], with_rbdf: bool) -> f64 {
        let Some(p) = self.representation(ranked) else {
            return 0.0;
        };
        let gap: f64 = p.iter().zip(self.target).map(|(a, b)| (a - b).abs()).sum();
        if with_rbdf {
            gap * self.rbdf(ranked).unwrap_or(0.0)
        } else {
            gap
        }
    }

    pub fn max_ted(&self) -> f64 {
        let min = self.target.iter().cloned().fold(f64::MAX, f64::min);
        2.0 * (1.0 - min)
    }

    pub fn texfair(&self, ranked: &[Vec<String>]) -> f64 {
        self.max_ted() - self.ted(ranked, true)
    }

    /// AWRF with per-document term-share associations, total variation.
    pub fn awrf_doc(&self, ranked: &[Vec<String>]) -> Option<f64> {
        let n = self.groups.len();
        let mut e = vec![0.0; n];
        for (i, d) in self.top(ranked).iter().enumerate() {
            let mags: Vec<usize> = self.groups.iter().map(|g| magnitude(g, d)).collect();
            let total: usize = mags.iter().sum();
            for g in 0..n {
                let a = if total == 0 {
                    1.0 / n as f64
                } else {
                    mags[g] as f64 / total as f64
                };
                e[g] += a * bias(i + 1, self.base);
            }
        }
        let norm: f64 = e.iter().sum();
        if norm == 0.0 {
            return None;
        }
        Some(0.5 * e.iter().zip(self.target).map(|(x, t)| (x / norm - t).abs()).sum::<f64>())
    }
}

/// RBO by direct evaluation of the series: the overlap at each depth is the
/// size of the intersection of the two prefixes. Items within a list are
/// distinct.
pub fn rbo_series<T: PartialEq>(a: &[T], b: &[T], p: f64, depth: usize, extrapolate: bool) -> f64 {
    let d_max = depth.min(a.len().max(b.len()));
    if d_max == 0 {
        return 1.0;
    }
    let overlap = |d: usize| -> f64 {
        let pb = &b[..d.min(b.len())];
        a.iter().take(d).filter(|x| pb.contains(x)).count() as f64
    };
    let mut s = 0.0;
    for d in 1..=d_max {
        s += (1.0 - p) * p.powi(d as i32 - 1) * overlap(d) / d as f64;
    }
    if extrapolate {
        s += overlap(d_max) / d_max as f64 * p.powi(d_max as i32);
    }
    s
}

/// Random micro-instance: docs as token lists over a vocabulary that mixes
/// group terms and neutral words.
pub struct Instance {
    pub groups: Vec<Vec<String>>,
    pub docs: Vec<Vec<String>>,
    /// Indices into `docs`, in rank order.
    pub ranking: Vec<usize>,
    pub k: usize,
}

const GROUP_TERMS: &[&[&str]] = &[&["she", "her", "mother"], &["he", "him"], &["xe", "xem", "sibling"]];
const NEUTRAL: &[&str] = &["ball", "the", "goal", "team", "7"];

pub fn random_instance(rng: &mut StdRng, max_groups: usize, max_docs: usize, max_tokens: usize, max_k: usize) -> Instance {
    let n_groups = rng.gen_range(2..=max_groups);
    let groups: Vec<Vec<String>> = GROUP_TERMS[..n_groups]
        .iter()
        .map(|g| g.iter().map(|s| s.to_string()).collect())
        .collect();
    let mut vocab: Vec<&str> = NEUTRAL.to_vec();
    for g in GROUP_TERMS.iter().take(n_groups) {
        vocab.extend_from_slice(g);
    }
    let n_docs = rng.gen_range(1..=max_docs);
    let docs: Vec<Vec<String>> = (0..n_docs)
        .map(|_| {
            let len = rng.gen_range(0..=max_tokens);
            (0..len).map(|_| vocab.choose(rng).unwrap().to_string()).collect()
        })
        .collect();
    let mut ranking: Vec<usize> = (0..n_docs).collect();
    ranking.shuffle(rng);
    ranking.truncate(rng.gen_range(1..=n_docs));
    Instance {
        groups,
        docs,
        ranking,
        k: rng.gen_range(1..=max_k),
    }
}

/// Renders tokens as text with random casing and separators, so the
/// library's tokenizer has to recover them.
pub fn render(rng: &mut StdRng, tokens: &[String]) -> String {
    let seps = [" ", "  ", ", ", "-", "! ", "\u{a0}", " ... "];
    let mut out = String::new();
    for (i, t) in tokens.iter().enumerate() {
        if i > 0 {
            out.push_str(seps.choose(rng).unwrap());
        }
        match rng.gen_range(0..3) {
            0 => out.push_str(t),
            1 => out.push_str(&t.to_uppercase()),
            _ => {
                let mut c = t.chars();
                if let Some(f) = c.next() {
                    out.extend(f.to_uppercase());
                    out.push_str(c.as_str());
                }
            }
        }
    }
    out
}

use crate::rankings::{Qrels, RankedList};

/// Reciprocal rank of the first document graded 1 or higher in the top-k.
/// `None` when the query has no judgments.
pub fn mrr(list: &RankedList, qrels: &Qrels, k: usize) -> Option<f64> {
    let Some(judged) = qrels.query(&list.query_id) else {
        log::warn!("query {:?} has no judgments; excluded from MRR", list.query_id);
        return None;
    };
    Some(
        list.entries
            .iter()
            .take(k)
            .position(|e| judged.get(&e.doc_id).is_some_and(|&g| g >= 1))
            .map(|i| 1.0 / (i + 1) as f64)
            .unwrap_or(0.0),
    )
}

fn discount(rank: usize) -> f64 {
    1.0 / ((rank + 1) as f64).log2()
}

/// nDCG@k with raw grades as gains and a log2 discount. `None` when the
/// query has no judgments; 0 when it has no relevant documents.
pub fn ndcg(list: &RankedList, qrels: &Qrels, k: usize) -> Option<f64> {
    let Some(judged) = qrels.query(&list.query_id) else {
        log::warn!("query {:?} has no judgments; excluded from nDCG", list.query_id);
        return None;
    };
    let dcg: f64 = list
        .entries
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, e)| judged.get(&e.doc_id).copied().unwrap_or(0) as f64 * discount(i + 1))
        .sum();
    let mut ideal: Vec<u32> = judged.values().copied().filter(|&g| g > 0).collect();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg: f64 = ideal
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, &g)| g as f64 * discount(i + 1))
        .sum();
    Some(if idcg > 0.0 { dcg / idcg } else { 0.0 })
}

use crate::UNKNOWN;

/// Cosine of the angle between two vectors; 0 when either is the zero
/// vector.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Where an entity lands.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClusterId {
    /// Index into the classifier's concern order.
    Concern(usize),
    Unknown,
}

impl ClusterId {
    pub fn name<'a>(&self, concerns: &'a [String]) -> &'a str {
        match self {
            ClusterId::Concern(i) => &concerns[*i],
            ClusterId::Unknown => UNKNOWN,
        }
    }

    /// Slot in a `concerns.len() + 1` vector whose last entry is Unknown.
    pub fn slot(&self, n_concerns: usize) -> usize {
        match self {
            ClusterId::Concern(i) => *i,
            ClusterId::Unknown => n_concerns,
        }
    }
}

/// Defining vectors of the concern clusters. The Unknown cluster is
/// implicit and has the zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpace {
    vectors: Vec<Vec<f64>>,
}

impl ClusterSpace {
    /// One orthogonal unit vector per concern.
    pub fn orthogonal(n_concerns: usize) -> Self {
        let vectors = (0..n_concerns)
            .map(|i| {
                let mut v = vec![0.0; n_concerns];
                v[i] = 1.0;
                v
            })
            .collect();
        ClusterSpace { vectors }
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// Unknown when every affinity is below `unknown_threshold` (or the vector
    /// is zero); otherwise the cluster with the highest cosine similarity,
    /// ties going to the earlier concern.
    pub fn assign(&self, affinities: &[f64], unknown_threshold: f64) -> ClusterId {
        if affinities.iter().all(|&a| a < unknown_threshold) || affinities.iter().all(|&a| a == 0.0)
        {
            return ClusterId::Unknown;
        }
        let mut best = ClusterId::Unknown;
        let mut best_cos = f64::NEG_INFINITY;
        for (i, v) in self.vectors.iter().enumerate() {
            let cos = cosine_similarity(affinities, v);
            if cos > best_cos {
                best_cos = cos;
                best = ClusterId::Concern(i);
            }
        }
        best
    }
}

/// Assigns an affinity vector against orthogonal concern clusters.
pub fn assign_cluster(affinities: &[f64], unknown_threshold: f64) -> ClusterId {
    ClusterSpace::orthogonal(affinities.len()).assign(affinities, unknown_threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names() -> Vec<String> {
        vec!["Database".into(), "Graphics".into(), "Networking".into()]
    }

    #[test]
    fn table_rows() {
        let c = names();
        assert_eq!(assign_cluster(&[0.9, 0.1, 0.2], 0.5).name(&c), "Database");
        assert_eq!(assign_cluster(&[0.05, 0.95, 0.1], 0.5).name(&c), "Graphics");
        assert_eq!(assign_cluster(&[0.02, 0.01, 0.92], 0.5).name(&c), "Networking");
    }

    #[test]
    fn cosine_against_unit_vector() {
        let cos = cosine_similarity(&[0.9, 0.1, 0.2], &[1.0, 0.0, 0.0]);
        assert!((cos - 0.9 / 0.86f64.sqrt()).abs() < 1e-12);
        assert!((cos - 0.9705).abs() < 5e-5);
    }

    #[test]
    fn unknown_cases() {
        assert_eq!(assign_cluster(&[0.0, 0.0, 0.0], 0.5), ClusterId::Unknown);
        assert_eq!(assign_cluster(&[0.0, 0.0, 0.0], 0.0), ClusterId::Unknown);
        assert_eq!(assign_cluster(&[0.4, 0.4, 0.1], 0.5), ClusterId::Unknown);
        assert_eq!(assign_cluster(&[0.4, 0.4, 0.1], 0.3), ClusterId::Concern(0));
        assert_eq!(assign_cluster(&[], 0.5), ClusterId::Unknown);
    }

    #[test]
    fn ties_prefer_earlier_concern() {
        assert_eq!(assign_cluster(&[0.2, 0.8, 0.8], 0.5), ClusterId::Concern(1));
    }

    #[test]
    fn unknown_slot_is_last() {
        assert_eq!(ClusterId::Unknown.slot(3), 3);
        assert_eq!(ClusterId::Concern(2).slot(3), 2);
        assert_eq!(ClusterId::Unknown.name(&names()), "Unknown");
    }
}

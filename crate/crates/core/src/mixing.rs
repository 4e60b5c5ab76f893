//! Subset-size planning and deterministic mixed-subset sampling.
//!
//! Training subsets are drawn without replacement from a real and a synthetic
//! pool. The sampling rules are pinned down to the bit so an emitted plan can
//! be reproduced from its provenance alone: a SplitMix64 stream per domain
//! (the synthetic stream seed is `seed ^ GOLDEN_GAMMA`), a partial
//! Fisher–Yates over the manifest's image order, and per-size seeds derived
//! as `seed ^ i` for the 1-based size index.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::annotations::DatasetManifest;
use crate::rng::{partial_shuffle, SplitMix64, GOLDEN_GAMMA};

#[derive(Debug, Error, PartialEq)]
pub enum MixingError {
    #[error("need n_max >= count >= 2, got n_max={n_max}, count={count}")]
    BadPlanArgs { n_max: u64, count: u32 },
    #[error("decades must be positive, got {0}")]
    BadDecades(f64),
    #[error(
        "log spacing collides at size {size} (indices {i} and {j}); \
         use fewer points or more decades"
    )]
    DuplicateSize { size: u64, i: u32, j: u32 },
    #[error("requested {requested} {domain} images but only {available} are available")]
    InsufficientImages {
        domain: &'static str,
        requested: u64,
        available: u64,
    },
    #[error("ratio must be in [0, 1], got {0}")]
    BadRatio(f64),
}

/// Round half up: `floor(x + 0.5)`. Used everywhere a fractional image count
/// becomes an integer one.
pub fn round_half_up(x: f64) -> u64 {
    debug_assert!(x >= 0.0);
    libm::floor(x + 0.5) as u64
}

/// Logarithmically spaced subset sizes ending at `n_max`.
///
/// `sizes[i] = floor(n_max * 10^(-decades * (count-i) / (count-1)))` for the
/// 1-based index, so the first size sits `decades` decades below `n_max` and
/// the last equals `n_max`. Rounding collisions are an error rather than a
/// silent deduplication.
pub fn plan_sizes(n_max: u64, count: u32, decades: f64) -> Result<Vec<u64>, MixingError> {
    if count < 2 || n_max < count as u64 {
        return Err(MixingError::BadPlanArgs { n_max, count });
    }
    if !(decades > 0.0) || !decades.is_finite() {
        return Err(MixingError::BadDecades(decades));
    }
    let mut sizes = Vec::with_capacity(count as usize);
    for i in 1..=count {
        let exponent = -decades * (count - i) as f64 / (count - 1) as f64;
        let size = libm::floor(n_max as f64 * libm::exp10(exponent)) as u64;
        sizes.push(size);
    }
    for i in 1..sizes.len() {
        if sizes[i] <= sizes[i - 1] {
            return Err(MixingError::DuplicateSize {
                size: sizes[i],
                i: i as u32,
                j: i as u32 + 1,
            });
        }
    }
    Ok(sizes)
}

/// Split a total subset size into real and synthetic counts at ratio `r`.
///
/// `n_real = round_half_up(r * n_total)`, the synthetic part takes the rest.
pub fn split_counts(n_total: u64, ratio: f64) -> (u64, u64) {
    assert!(
        (0.0..=1.0).contains(&ratio),
        "ratio must be in [0, 1], got {ratio}"
    );
    let n_real = round_half_up(ratio * n_total as f64).min(n_total);
    (n_real, n_total - n_real)
}

/// Where a selection came from; enough to reproduce it exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub seed: u64,
    /// Requested real-data ratio, when the draw was made by a plan.
    pub ratio: Option<f64>,
    pub n_total: u64,
    pub real_manifest: String,
    pub synthetic_manifest: String,
}

/// Image ids drawn from the real and synthetic pools, without replacement.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetSelection {
    pub real_ids: Vec<String>,
    pub synthetic_ids: Vec<String>,
    pub provenance: Provenance,
}

/// Draw `n_real` + `n_synthetic` image ids deterministically.
///
/// Each domain gets its own SplitMix64 stream; identical inputs and seed
/// reproduce the identical selection byte for byte.
pub fn sample_mix(
    real: &DatasetManifest,
    synthetic: &DatasetManifest,
    n_real: u64,
    n_synthetic: u64,
    seed: u64,
) -> Result<SubsetSelection, MixingError> {
    let draw = |manifest: &DatasetManifest,
                n: u64,
                stream_seed: u64,
                domain: &'static str|
     -> Result<Vec<String>, MixingError> {
        let available = manifest.n_images() as u64;
        if n > available {
            return Err(MixingError::InsufficientImages {
                domain,
                requested: n,
                available,
            });
        }
        let mut ids: Vec<String> = manifest
            .images()
            .iter()
            .map(|img| img.image_id.clone())
            .collect();
        let mut rng = SplitMix64::new(stream_seed);
        partial_shuffle(&mut rng, &mut ids, n as usize);
        ids.truncate(n as usize);
        Ok(ids)
    };

    let real_ids = draw(real, n_real, seed, "real")?;
    let synthetic_ids = draw(synthetic, n_synthetic, seed ^ GOLDEN_GAMMA, "synthetic")?;
    Ok(SubsetSelection {
        real_ids,
        synthetic_ids,
        provenance: Provenance {
            seed,
            ratio: None,
            n_total: n_real + n_synthetic,
            real_manifest: real.name().to_string(),
            synthetic_manifest: synthetic.name().to_string(),
        },
    })
}

/// Planned counts for one subset size.
#[derive(Debug, Clone, PartialEq)]
pub struct SizePlan {
    pub n_total: u64,
    pub n_real: u64,
    pub n_synthetic: u64,
    /// Seed this size's selection was drawn with (`plan seed ^ index`).
    pub seed: u64,
}

/// A full mixing plan: the size ladder with per-size counts and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct MixPlan {
    pub ratio: f64,
    pub seed: u64,
    pub sizes: Vec<SizePlan>,
}

/// A plan together with its drawn selections, one per size.
#[derive(Debug, Clone)]
pub struct PlannedMix {
    pub plan: MixPlan,
    pub selections: Vec<SubsetSelection>,
}

/// Build the complete plan for one ratio: log-spaced sizes, per-size splits,
/// and a deterministic selection per size.
///
/// `n_max` defaults to the size of the real pool. Per-size seeds are
/// `seed ^ i` with the 1-based size index, so re-running with a different
/// top-level seed models an independent draw of every subset.
pub fn build_plan(
    real: &DatasetManifest,
    synthetic: &DatasetManifest,
    ratio: f64,
    seed: u64,
    count: u32,
    decades: f64,
    n_max: Option<u64>,
) -> Result<PlannedMix, MixingError> {
    if !(0.0..=1.0).contains(&ratio) || ratio.is_nan() {
        return Err(MixingError::BadRatio(ratio));
    }
    let n_max = n_max.unwrap_or(real.n_images() as u64);
    let sizes = plan_sizes(n_max, count, decades)?;

    // Validate the whole ladder up front so a plan either exists or fails
    // with the offending size, not a partial output.
    let mut size_plans = Vec::with_capacity(sizes.len());
    for (idx, &n_total) in sizes.iter().enumerate() {
        let (n_real, n_synthetic) = split_counts(n_total, ratio);
        if n_real > real.n_images() as u64 {
            return Err(MixingError::InsufficientImages {
                domain: "real",
                requested: n_real,
                available: real.n_images() as u64,
            });
        }
        if n_synthetic > synthetic.n_images() as u64 {
            return Err(MixingError::InsufficientImages {
                domain: "synthetic",
                requested: n_synthetic,
                available: synthetic.n_images() as u64,
            });
        }
        size_plans.push(SizePlan {
            n_total,
            n_real,
            n_synthetic,
            seed: seed ^ (idx as u64 + 1),
        });
    }

    let mut selections = Vec::with_capacity(size_plans.len());
    for sp in &size_plans {
        let mut selection = sample_mix(real, synthetic, sp.n_real, sp.n_synthetic, sp.seed)?;
        selection.provenance.ratio = Some(ratio);
        selections.push(selection);
    }

    Ok(PlannedMix {
        plan: MixPlan {
            ratio,
            seed,
            sizes: size_plans,
        },
        selections,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::annotations::{Domain, ImageRecord};
    use alloc::format;
    use alloc::vec;
    use proptest::prelude::*;

    fn pool(name: &str, prefix: &str, n: usize, domain: Domain) -> DatasetManifest {
        let images = (0..n)
            .map(|i| ImageRecord {
                image_id: format!("{prefix}{i:02}"),
                width: 10,
                height: 10,
                domain,
                instances: vec![],
            })
            .collect();
        DatasetManifest::new(name, vec!["car".to_string()], images).unwrap()
    }

    #[test]
    fn plan_sizes_paper_anchor() {
        let sizes = plan_sizes(2727, 10, 1.0).unwrap();
        assert_eq!(
            sizes,
            vec![272, 352, 454, 587, 758, 980, 1265, 1634, 2111, 2727]
        );
    }

    #[test]
    fn plan_sizes_small_cases() {
        assert_eq!(plan_sizes(100, 2, 1.0).unwrap(), vec![10, 100]);
        assert_eq!(plan_sizes(1000, 4, 1.0).unwrap(), vec![100, 215, 464, 1000]);
    }

    #[test]
    fn plan_sizes_rejects_collisions_and_bad_args() {
        assert!(matches!(
            plan_sizes(10, 10, 1.0),
            Err(MixingError::DuplicateSize { .. })
        ));
        assert!(matches!(
            plan_sizes(5, 6, 1.0),
            Err(MixingError::BadPlanArgs { .. })
        ));
        assert!(matches!(
            plan_sizes(100, 1, 1.0),
            Err(MixingError::BadPlanArgs { .. })
        ));
        assert!(matches!(
            plan_sizes(100, 3, 0.0),
            Err(MixingError::BadDecades(_))
        ));
    }

    #[test]
    fn split_counts_paper_example() {
        assert_eq!(split_counts(272, 0.20), (54, 218));
    }

    #[test]
    fn split_counts_endpoints_and_half() {
        assert_eq!(split_counts(100, 0.0), (0, 100));
        assert_eq!(split_counts(100, 1.0), (100, 0));
        // round-half-up on the exact .5 case
        assert_eq!(split_counts(2727, 0.5), (1364, 1363));
    }

    #[test]
    fn sample_mix_reference_selection() {
        // Expected ids frozen from an independent implementation of the
        // SplitMix64 + partial Fisher-Yates rules.
        let real = pool("real", "r", 10, Domain::Real);
        let synthetic = pool("syn", "s", 10, Domain::Synthetic);
        let sel = sample_mix(&real, &synthetic, 3, 3, 42).unwrap();
        assert_eq!(sel.real_ids, vec!["r03", "r02", "r04"]);
        assert_eq!(sel.synthetic_ids, vec!["s01", "s00", "s06"]);
    }

    #[test]
    fn sample_mix_full_draw_is_permutation() {
        let real = pool("real", "r", 10, Domain::Real);
        let synthetic = pool("syn", "s", 10, Domain::Synthetic);
        let sel = sample_mix(&real, &synthetic, 10, 0, 42).unwrap();
        let mut ids = sel.real_ids.clone();
        ids.sort();
        let expected: Vec<String> = (0..10).map(|i| format!("r{i:02}")).collect();
        assert_eq!(ids, expected);
    }

    #[test]
    fn sample_mix_is_deterministic() {
        let real = pool("real", "r", 10, Domain::Real);
        let synthetic = pool("syn", "s", 10, Domain::Synthetic);
        let a = sample_mix(&real, &synthetic, 4, 6, 1234).unwrap();
        let b = sample_mix(&real, &synthetic, 4, 6, 1234).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_mix_insufficient_pool() {
        let real = pool("real", "r", 3, Domain::Real);
        let synthetic = pool("syn", "s", 3, Domain::Synthetic);
        assert_eq!(
            sample_mix(&real, &synthetic, 5, 0, 1),
            Err(MixingError::InsufficientImages {
                domain: "real",
                requested: 5,
                available: 3
            })
        );
    }

    #[test]
    fn different_seeds_differ_on_large_pools() {
        let real = pool("real", "r", 100, Domain::Real);
        let synthetic = pool("syn", "s", 100, Domain::Synthetic);
        let a = sample_mix(&real, &synthetic, 20, 20, 1).unwrap();
        let b = sample_mix(&real, &synthetic, 20, 20, 2).unwrap();
        assert_ne!(a.real_ids, b.real_ids);
        assert_ne!(a.synthetic_ids, b.synthetic_ids);
    }

    /// Independent re-implementation of the draw rules, kept deliberately
    /// naive, as an oracle for `sample_mix`.
    fn reference_draw(ids: &[String], n: usize, stream_seed: u64) -> Vec<String> {
        let mut state = stream_seed;
        let mut next = move || {
            state = state.wrapping_add(0x9E3779B97F4A7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
            z ^ (z >> 31)
        };
        let mut pool: Vec<String> = ids.to_vec();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let j = i + (next() % (pool.len() - i) as u64) as usize;
            pool.swap(i, j);
            out.push(pool[i].clone());
        }
        out
    }

    #[test]
    fn sample_mix_matches_reference_oracle() {
        let real = pool("real", "r", 23, Domain::Real);
        let synthetic = pool("syn", "s", 31, Domain::Synthetic);
        for seed in [0u64, 1, 42, 0xFFFF_FFFF_FFFF_FFFF] {
            let sel = sample_mix(&real, &synthetic, 7, 11, seed).unwrap();
            let real_ids: Vec<String> =
                real.images().iter().map(|i| i.image_id.clone()).collect();
            let syn_ids: Vec<String> = synthetic
                .images()
                .iter()
                .map(|i| i.image_id.clone())
                .collect();
            assert_eq!(sel.real_ids, reference_draw(&real_ids, 7, seed));
            assert_eq!(
                sel.synthetic_ids,
                reference_draw(&syn_ids, 11, seed ^ 0x9E3779B97F4A7C15)
            );
        }
    }

    #[test]
    fn build_plan_paper_example() {
        let real = pool("city", "r", 2727, Domain::Real);
        let synthetic = pool("syn", "s", 25000, Domain::Synthetic);
        let planned = build_plan(&real, &synthetic, 0.20, 42, 10, 1.0, None).unwrap();
        let first = &planned.plan.sizes[0];
        assert_eq!(first.n_total, 272);
        assert_eq!(first.n_real, 54);
        assert_eq!(first.n_synthetic, 218);
        assert_eq!(planned.selections[0].real_ids.len(), 54);
        assert_eq!(planned.selections[0].synthetic_ids.len(), 218);
        assert_eq!(planned.plan.sizes.last().unwrap().n_total, 2727);
    }

    #[test]
    fn build_plan_pure_endpoints() {
        let real = pool("city", "r", 2727, Domain::Real);
        let synthetic = pool("syn", "s", 3000, Domain::Synthetic);

        let all_real = build_plan(&real, &synthetic, 1.0, 7, 10, 1.0, None).unwrap();
        let top = all_real.selections.last().unwrap();
        assert_eq!(top.real_ids.len(), 2727);
        assert!(top.synthetic_ids.is_empty());

        let all_syn = build_plan(&real, &synthetic, 0.0, 7, 10, 1.0, None).unwrap();
        assert!(all_syn.selections.iter().all(|s| s.real_ids.is_empty()));
    }

    #[test]
    fn build_plan_derives_per_size_seeds() {
        let real = pool("city", "r", 100, Domain::Real);
        let synthetic = pool("syn", "s", 100, Domain::Synthetic);
        let planned = build_plan(&real, &synthetic, 0.5, 40, 3, 1.0, None).unwrap();
        let seeds: Vec<u64> = planned.plan.sizes.iter().map(|s| s.seed).collect();
        assert_eq!(seeds, vec![40 ^ 1, 40 ^ 2, 40 ^ 3]);
        for (sp, sel) in planned.plan.sizes.iter().zip(&planned.selections) {
            assert_eq!(sel.provenance.seed, sp.seed);
            assert_eq!(sel.provenance.ratio, Some(0.5));
        }
    }

    #[test]
    fn build_plan_rejects_undersized_pool() {
        let real = pool("city", "r", 10, Domain::Real);
        let synthetic = pool("syn", "s", 10, Domain::Synthetic);
        let err = build_plan(&real, &synthetic, 1.0, 7, 3, 1.0, Some(100)).unwrap_err();
        assert!(matches!(err, MixingError::InsufficientImages { .. }));
    }

    proptest! {
        #[test]
        fn split_counts_sum_and_complement(n in 1u64..100_000, r in 0.0..=1.0f64) {
            let (real, synthetic) = split_counts(n, r);
            prop_assert_eq!(real + synthetic, n);

            // Complement symmetry away from exact half-integer products.
            let product = r * n as f64;
            let frac = product - libm::floor(product);
            if (frac - 0.5).abs() > 1e-9 {
                let (real_c, _) = split_counts(n, 1.0 - r);
                prop_assert_eq!(real_c, synthetic);
            }
        }

        #[test]
        fn plan_sizes_strictly_increasing_ending_at_max(
            n_max in 50u64..1_000_000,
            count in 2u32..12,
            decades in 0.5..2.0f64,
        ) {
            if let Ok(sizes) = plan_sizes(n_max, count, decades) {
                prop_assert_eq!(*sizes.last().unwrap(), n_max);
                for w in sizes.windows(2) {
                    prop_assert!(w[0] < w[1]);
                }
            }
        }

        #[test]
        fn sampled_ids_are_unique_subsets(
            n_real in 0usize..20,
            n_syn in 0usize..20,
            seed in proptest::num::u64::ANY,
        ) {
            let real = pool("real", "r", 20, Domain::Real);
            let synthetic = pool("syn", "s", 20, Domain::Synthetic);
            let sel = sample_mix(&real, &synthetic, n_real as u64, n_syn as u64, seed).unwrap();

            let mut unique = sel.real_ids.clone();
            unique.sort();
            unique.dedup();
            prop_assert_eq!(unique.len(), sel.real_ids.len());
            for id in &sel.real_ids {
                prop_assert!(real.images().iter().any(|img| &img.image_id == id));
            }
            let mut unique_s = sel.synthetic_ids.clone();
            unique_s.sort();
            unique_s.dedup();
            prop_assert_eq!(unique_s.len(), sel.synthetic_ids.len());
            for id in &sel.synthetic_ids {
                prop_assert!(synthetic.images().iter().any(|img| &img.image_id == id));
            }
        }
    }
}

use std::f64::consts::FRAC_PI_4;

/// A range of iteration counts tried `repetitions` times, each time drawing
/// the count uniformly from `lo..hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Stage {
    pub lo: u64,
    pub hi: u64,
    pub repetitions: u32,
}

/// Iteration schedule for a search whose number of marked items is unknown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroverPlan {
    stages: Vec<Stage>,
}

/// How a caller wants the search schedule chosen once the support size is
/// known.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PlanPolicy {
    /// Exponentially growing guesses; see [`GroverPlan::adaptive`].
    Adaptive,
    /// Exactly `iterations` Grover iterations, measured `repetitions` times.
    Fixed { iterations: u64, repetitions: u32 },
}

impl PlanPolicy {
    pub fn plan(&self, support: usize) -> GroverPlan {
        match *self {
            PlanPolicy::Adaptive => GroverPlan::adaptive(support),
            PlanPolicy::Fixed {
                iterations,
                repetitions,
            } => GroverPlan::fixed(iterations, repetitions),
        }
    }
}

/// Repetitions per stage of the adaptive schedule.
const STAGE_REPETITIONS: u32 = 3;
/// Stages run at the cap after the growth phase. Each capped attempt
/// succeeds with probability at least 1/4 whenever something is marked, so
/// six of them leave a false negative below (3/4)^6 < 0.18.
const CAPPED_STAGES: usize = 2;

impl GroverPlan {
    /// Stages `s = 0, 1, 2, …` with iteration counts drawn below
    /// `min(⌈2^{s/2}⌉, cap)` where `cap = ⌈π/4·√support⌉`, three attempts
    /// per stage, and two extra stages once the cap is reached.
    pub fn adaptive(support: usize) -> Self {
        Self::with_growth(support, 1.0, STAGE_REPETITIONS, CAPPED_STAGES)
    }

    pub fn with_growth(support: usize, growth: f64, repetitions: u32, capped_stages: usize) -> Self {
        let cap = Self::cap(support);
        let mut stages = Vec::new();
        let mut s = 0i32;
        loop {
            let bound = ((growth * 2f64.powf(f64::from(s) / 2.0)).ceil() as u64).clamp(1, cap);
            stages.push(Stage {
                lo: 0,
                hi: bound,
                repetitions,
            });
            if bound == cap {
                break;
            }
            s += 1;
        }
        for _ in 0..capped_stages {
            stages.push(Stage {
                lo: 0,
                hi: cap,
                repetitions,
            });
        }
        Self { stages }
    }

    pub fn fixed(iterations: u64, repetitions: u32) -> Self {
        Self {
            stages: vec![Stage {
                lo: iterations,
                hi: iterations + 1,
                repetitions: repetitions.max(1),
            }],
        }
    }

    /// `⌈π/4·√size⌉`, at least 1.
    pub fn cap(size: usize) -> u64 {
        ((FRAC_PI_4 * (size as f64).sqrt()).ceil() as u64).max(1)
    }

    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    /// Largest iteration count any single attempt can use.
    pub fn max_iterations(&self) -> u64 {
        self.stages.iter().map(|s| s.hi - 1).max().unwrap_or(0)
    }

    /// Iterations executed if every attempt drew its largest count.
    pub fn worst_case_iterations(&self) -> u64 {
        self.stages
            .iter()
            .map(|s| (s.hi - 1) * u64::from(s.repetitions))
            .sum()
    }
}

/// Optimal iteration count `round(π/(4θ) − 1/2)` for `t` marked out of `size`.
pub fn optimal_iterations(size: usize, t: usize) -> u64 {
    if t == 0 || size == 0 {
        return 0;
    }
    let theta = ((t as f64) / (size as f64)).sqrt().asin();
    (FRAC_PI_4 / theta - 0.5).round().max(0.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adaptive_schedule_grows_to_cap() {
        let plan = GroverPlan::adaptive(256);
        assert_eq!(GroverPlan::cap(256), 13);
        let his: Vec<u64> = plan.stages().iter().map(|s| s.hi).collect();
        assert_eq!(his, vec![1, 2, 2, 3, 4, 6, 8, 12, 13, 13, 13]);
        assert!(plan.stages().iter().all(|s| s.repetitions == 3 && s.hi > s.lo));
        assert_eq!(plan.max_iterations(), 12);
    }

    #[test]
    fn tiny_supports() {
        let plan = GroverPlan::adaptive(1);
        assert!(plan.stages().iter().all(|s| s.hi == 1));
        assert_eq!(plan.max_iterations(), 0);
    }

    #[test]
    fn fixed_plan() {
        let plan = GroverPlan::fixed(3, 0);
        assert_eq!(plan.stages(), &[Stage { lo: 3, hi: 4, repetitions: 1 }]);
    }

    #[test]
    fn optimal_counts() {
        assert_eq!(optimal_iterations(4, 1), 1);
        assert_eq!(optimal_iterations(8, 2), 1);
        assert_eq!(optimal_iterations(16, 4), 1);
        assert_eq!(optimal_iterations(64, 1), 6);
        assert_eq!(optimal_iterations(5, 5), 0);
    }
}

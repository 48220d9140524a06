//! Plan execution with a reference-share cache and an evaluation counter.

use std::collections::HashMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rayon::prelude::*;

use super::ScenarioSet;
use crate::citymodel::{CityModel, REFERENCE_SCENARIO};
use crate::impact::{ImpactMatrix, MetricMatrix};
use crate::vcscore::{VcScorer, VisualCapital};
use crate::viewmetrics::{aggregate, MetricRegistry, MetricVector};
use crate::visibility::{visual_share, Scene, SimulationConfig, VisualShareTensor};
use crate::{Error, Result};

/// Simulation result for one building in one scenario.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub tensor: VisualShareTensor,
    pub metrics: MetricVector,
    pub vc: VisualCapital,
}

#[derive(Debug, Clone)]
pub struct PlanOutput {
    pub reference: MetricMatrix,
    /// One matrix per scenario, in plan order.
    pub alternatives: Vec<MetricMatrix>,
    pub vc_reference: MetricMatrix,
    pub vc_alternatives: Vec<MetricMatrix>,
    /// Simulations actually run (cache hits excluded).
    pub evaluations: usize,
}

impl PlanOutput {
    pub fn metric_impact(&self, set: &ScenarioSet) -> Result<ImpactMatrix> {
        set.impact(&self.reference, &self.alternatives)
    }

    pub fn vc_impact(&self, set: &ScenarioSet) -> Result<ImpactMatrix> {
        set.impact(&self.vc_reference, &self.vc_alternatives)
    }
}

/// Evaluates scenario plans. Reference evaluations are cached by city
/// content hash and building id, so repeated plans over the same reference
/// reuse them.
pub struct PlanRunner {
    config: SimulationConfig,
    registry: MetricRegistry,
    scorer: VcScorer,
    cache: Mutex<HashMap<(String, String), Evaluation>>,
    evaluations: AtomicUsize,
}

impl PlanRunner {
    pub fn new(config: SimulationConfig, registry: MetricRegistry, scorer: VcScorer) -> Result<Self> {
        config.validate()?;
        scorer.check_registry(&registry)?;
        Ok(Self {
            config,
            registry,
            scorer,
            cache: Mutex::new(HashMap::new()),
            evaluations: AtomicUsize::new(0),
        })
    }

    /// Total simulations run by this runner.
    pub fn evaluation_count(&self) -> usize {
        self.evaluations.load(Ordering::SeqCst)
    }

    fn simulate(&self, scene: &Scene, id: &str) -> Result<Evaluation> {
        let tensor = visual_share(scene, id, &self.config)?;
        let metrics = aggregate(&tensor, &self.registry)?;
        let vc = self.scorer.score(&metrics)?;
        self.evaluations.fetch_add(1, Ordering::SeqCst);
        Ok(Evaluation { tensor, metrics, vc })
    }

    fn reference(&self, scene: &Scene, id: &str) -> Result<Evaluation> {
        let key = (scene.city().content_hash().to_string(), id.to_string());
        if let Some(hit) = self.cache.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let eval = self.simulate(scene, id)?;
        self.cache.lock().expect("cache lock").insert(key, eval.clone());
        Ok(eval)
    }

    /// Runs every planned evaluation on a pool of `workers` threads.
    /// Outputs do not depend on the worker count.
    pub fn run(&self, set: &ScenarioSet, workers: usize) -> Result<PlanOutput> {
        if workers < 1 {
            return Err(Error::Config("worker count must be at least 1".into()));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::Internal(e.to_string()))?;
        pool.install(|| self.run_on_current_pool(set))
    }

    fn run_on_current_pool(&self, set: &ScenarioSet) -> Result<PlanOutput> {
        let before = self.evaluation_count();
        let names = self.registry.names();
        let ref_scene = Scene::new(&set.reference);
        let ref_evals: Vec<Evaluation> = set
            .reference_window()
            .par_iter()
            .map(|id| self.reference(&ref_scene, id))
            .collect::<Result<_>>()?;
        let alt_evals: Vec<Vec<Evaluation>> = set
            .scenarios
            .par_iter()
            .map(|s| {
                let city = set.reference.apply_edit(&s.edit)?.with_scenario_id(&s.id);
                let scene = Scene::new(&city);
                s.evaluation_window
                    .par_iter()
                    .map(|id| self.simulate(&scene, id))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;

        let matrices = |id: &str, evals: &[Evaluation]| -> Result<(MetricMatrix, MetricMatrix)> {
            let vectors: Vec<MetricVector> = evals.iter().map(|e| e.metrics.clone()).collect();
            let vc: Vec<VisualCapital> = evals.iter().map(|e| e.vc.clone()).collect();
            Ok((
                MetricMatrix::from_vectors(id, names.clone(), &vectors)?,
                MetricMatrix::from_vc(id, &vc)?,
            ))
        };
        let (reference, vc_reference) = matrices(REFERENCE_SCENARIO, &ref_evals)?;
        let mut alternatives = Vec::with_capacity(set.len());
        let mut vc_alternatives = Vec::with_capacity(set.len());
        for (s, evals) in set.scenarios.iter().zip(&alt_evals) {
            let (m, v) = matrices(&s.id, evals)?;
            alternatives.push(m);
            vc_alternatives.push(v);
        }
        Ok(PlanOutput {
            reference,
            alternatives,
            vc_reference,
            vc_alternatives,
            evaluations: self.evaluation_count() - before,
        })
    }
}

/// Simulates, aggregates and scores the given buildings of one city on the
/// current rayon pool, in the given order.
pub fn evaluate_buildings(
    city: &CityModel,
    ids: &[String],
    config: &SimulationConfig,
    registry: &MetricRegistry,
    scorer: &VcScorer,
) -> Result<Vec<Evaluation>> {
    let scene = Scene::new(city);
    ids.par_iter()
        .map(|id| {
            let tensor = visual_share(&scene, id, config)?;
            let metrics = aggregate(&tensor, registry)?;
            let vc = scorer.score(&metrics)?;
            Ok(Evaluation { tensor, metrics, vc })
        })
        .collect()
}

/// One-shot plan execution without a shared cache.
pub fn run_plan(
    set: &ScenarioSet,
    config: &SimulationConfig,
    registry: &MetricRegistry,
    scorer: &VcScorer,
    workers: usize,
) -> Result<PlanOutput> {
    PlanRunner::new(*config, registry.clone(), scorer.clone())?.run(set, workers)
}

//! The factorized plan distribution: softmax over legal tokens at each of up
//! to three autoregressive positions, with exact log-probabilities and
//! score-function gradients.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::action::{Action, ActionKind};
use crate::env::{Observation, Task, WidgetKind};
use crate::plan::{Plan, Token};

use super::features::{features, payload_candidates, FEATURE_DIM, HOTKEY_VOCABULARY};
use super::params::PlannerParams;
use super::AgentError;

/// One past step as the planner remembers it.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryStep {
    pub plan: Plan,
    pub action: Action,
}

/// Interaction history up to the current step.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct History {
    pub steps: Vec<HistoryStep>,
}

impl History {
    pub fn push(&mut self, plan: Plan, action: Action) {
        self.steps.push(HistoryStep { plan, action });
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Everything the planner conditions on at one step.
#[derive(Debug, Clone, Copy)]
pub struct StepContext<'a> {
    pub task: &'a Task,
    pub history: &'a History,
    pub o_prev: &'a Observation,
    pub o_cur: &'a Observation,
}

/// Action kinds that can currently be completed into a full plan.
fn legal_kinds(ctx: &StepContext<'_>) -> Vec<ActionKind> {
    let views = &ctx.o_cur.views;
    let any_widget = !views.is_empty();
    let any_field = views.iter().any(|v| v.kind == WidgetKind::TextField);
    let any_payload = !payload_candidates(&ctx.task.instruction).is_empty();
    let mut kinds = Vec::new();
    for kind in ActionKind::ALL {
        let legal = match kind {
            ActionKind::Click | ActionKind::DoubleClick | ActionKind::Drag => any_widget,
            ActionKind::Type => any_field && any_payload,
            ActionKind::Hotkey => true,
            ActionKind::Finish => true,
        };
        if legal {
            kinds.push(kind);
        }
    }
    kinds
}

/// Legal tokens at the position following `prefix`. An empty return means the
/// plan is complete.
fn legal_tokens(ctx: &StepContext<'_>, prefix: &[Token]) -> Vec<Token> {
    let views = &ctx.o_cur.views;
    match prefix {
        [] => legal_kinds(ctx).into_iter().map(Token::Kind).collect(),
        [Token::Kind(kind)] => match kind {
            ActionKind::Finish => Vec::new(),
            ActionKind::Hotkey => HOTKEY_VOCABULARY
                .iter()
                .map(|k| Token::Argument((*k).to_string()))
                .collect(),
            ActionKind::Type => views
                .iter()
                .filter(|v| v.kind == WidgetKind::TextField)
                .map(|v| Token::Target(v.id.clone()))
                .collect(),
            ActionKind::Click | ActionKind::DoubleClick | ActionKind::Drag => {
                views.iter().map(|v| Token::Target(v.id.clone())).collect()
            }
        },
        [Token::Kind(kind), _second] => match kind {
            ActionKind::Type => payload_candidates(&ctx.task.instruction)
                .into_iter()
                .map(Token::Argument)
                .collect(),
            ActionKind::Drag => views
                .iter()
                .map(|v| Token::Argument(v.id.clone()))
                .collect(),
            _ => Vec::new(),
        },
        _ => Vec::new(),
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.iter().map(|e| e / z).collect()
}

/// The conditional distribution over legal tokens after `prefix`.
/// Temperature scales logits as `theta . phi / t`.
pub fn conditional_distribution(
    params: &PlannerParams,
    ctx: &StepContext<'_>,
    prefix: &[Token],
    temperature: f64,
) -> Result<Vec<(Token, f64)>, AgentError> {
    params.validate()?;
    let tokens = legal_tokens(ctx, prefix);
    if tokens.is_empty() {
        return Err(AgentError::DegenerateObservation {
            position: prefix.len(),
        });
    }
    let logits: Vec<f64> = tokens
        .iter()
        .map(|t| {
            let phi = features(ctx, prefix, t);
            dot(&params.theta, &phi) / temperature
        })
        .collect();
    let probs = softmax(&logits);
    Ok(tokens.into_iter().zip(probs).collect())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Per-token evaluation of a complete plan under the current parameters.
#[derive(Debug, Clone)]
pub struct PlanEval {
    /// Conditional probability of each chosen token.
    pub token_probs: Vec<f64>,
    /// Score-function gradient of each chosen token's log-probability.
    pub token_grads: Vec<Vec<f64>>,
    pub logprob: f64,
}

/// Evaluate a plan's per-token probabilities and gradients. Errors when a
/// token is not legal in this context.
pub fn plan_eval(
    params: &PlannerParams,
    ctx: &StepContext<'_>,
    plan: &Plan,
    temperature: f64,
) -> Result<PlanEval, AgentError> {
    let tokens = plan.tokens();
    let mut token_probs = Vec::with_capacity(tokens.len());
    let mut token_grads = Vec::with_capacity(tokens.len());
    let mut logprob = 0.0;
    for (pos, token) in tokens.iter().enumerate() {
        let prefix = &tokens[..pos];
        let dist = conditional_distribution(params, ctx, prefix, temperature)?;
        let Some(choice_idx) = dist.iter().position(|(t, _)| t == token) else {
            return Err(AgentError::IllegalPlan(format!(
                "token {token:?} not legal at position {pos}"
            )));
        };
        let prob = dist[choice_idx].1;
        // grad log p(chosen) = (phi(chosen) - sum_t p(t) phi(t)) / temperature
        let mut grad = features(ctx, prefix, token);
        let mut expected = vec![0.0; FEATURE_DIM];
        for (t, p) in &dist {
            let phi = features(ctx, prefix, t);
            for (e, f) in expected.iter_mut().zip(&phi) {
                *e += p * f;
            }
        }
        for (g, e) in grad.iter_mut().zip(&expected) {
            *g = (*g - e) / temperature;
        }
        token_probs.push(prob);
        token_grads.push(grad);
        logprob += prob.ln();
    }
    Ok(PlanEval {
        token_probs,
        token_grads,
        logprob,
    })
}

/// Gradient of the plan's total log-probability with respect to theta.
pub fn grad_logprob(
    params: &PlannerParams,
    ctx: &StepContext<'_>,
    plan: &Plan,
    temperature: f64,
) -> Result<Vec<f64>, AgentError> {
    let eval = plan_eval(params, ctx, plan, temperature)?;
    let mut grad = vec![0.0; FEATURE_DIM];
    for token_grad in &eval.token_grads {
        for (g, t) in grad.iter_mut().zip(token_grad) {
            *g += t;
        }
    }
    Ok(grad)
}

/// A sampled plan with its log-probability at sampling time.
#[derive(Debug, Clone)]
pub struct SampledPlan {
    pub plan: Plan,
    pub logprob: f64,
}

/// Draw one plan, consuming the caller's RNG stream.
pub fn sample_plan(
    params: &PlannerParams,
    ctx: &StepContext<'_>,
    temperature: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Plan, AgentError> {
    let mut tokens: Vec<Token> = Vec::new();
    loop {
        let dist = conditional_distribution(params, ctx, &tokens, temperature)?;
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = dist.len() - 1;
        for (i, (_, p)) in dist.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = i;
                break;
            }
        }
        let (token, _) = dist.into_iter().nth(chosen).expect("chosen in range");
        tokens.push(token);
        if legal_tokens(ctx, &tokens).is_empty() {
            return Ok(plan_from_tokens(&tokens));
        }
    }
}

/// Draw `group` i.i.d. plans from the factorized distribution.
pub fn sample_group(
    params: &PlannerParams,
    ctx: &StepContext<'_>,
    group: usize,
    temperature: f64,
    seed: u64,
) -> Result<Vec<SampledPlan>, AgentError> {
    if group < 2 {
        return Err(AgentError::GroupTooSmall(group));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(group);
    for _ in 0..group {
        let plan = sample_plan(params, ctx, temperature, &mut rng)?;
        let logprob = plan_eval(params, ctx, &plan, temperature)?.logprob;
        out.push(SampledPlan { plan, logprob });
    }
    Ok(out)
}

fn plan_from_tokens(tokens: &[Token]) -> Plan {
    let Some(Token::Kind(kind)) = tokens.first() else {
        return Plan::finish();
    };
    let mut plan = Plan {
        kind: *kind,
        target: None,
        argument: String::new(),
        rationale: String::new(),
    };
    for token in &tokens[1..] {
        match token {
            Token::Target(id) => plan.target = Some(id.clone()),
            Token::Argument(arg) => plan.argument = arg.clone(),
            Token::Kind(_) => {}
        }
    }
    plan
}

/// Every representable plan in this context with its probability.
pub fn enumerate_plans(
    params: &PlannerParams,
    ctx: &StepContext<'_>,
    temperature: f64,
) -> Result<Vec<(Plan, f64)>, AgentError> {
    let mut out = Vec::new();
    let mut stack: Vec<(Vec<Token>, f64)> = vec![(Vec::new(), 1.0)];
    while let Some((prefix, prob)) = stack.pop() {
        if !prefix.is_empty() && legal_tokens(ctx, &prefix).is_empty() {
            out.push((plan_from_tokens(&prefix), prob));
            continue;
        }
        for (token, p) in conditional_distribution(params, ctx, &prefix, temperature)? {
            let mut next = prefix.clone();
            next.push(token);
            stack.push((next, prob * p));
        }
    }
    Ok(out)
}

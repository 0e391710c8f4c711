//! Resolution-dependent state rendering.
//!
//! A render scales every visible widget's bbox into the target resolution
//! using a conservative covering rectangle (floor the origin, ceil the far
//! corner). When two quantized rectangles touch or overlap, both widgets'
//! values are blanked: at low resolutions the renderer genuinely loses
//! information, which is what gives multi-resolution judging its bite. A
//! native-resolution render is always lossless.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::env::model::{SoftwareModel, WidgetKind, WorldState};
use crate::env::EnvError;
use crate::geometry::{Rect, Resolution};

/// Minimum supported render width in pixels.
pub const MIN_RENDER_WIDTH: u32 = 64;

/// One widget as it appears in a rendered observation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WidgetView {
    pub id: String,
    pub kind: WidgetKind,
    pub bbox: Rect,
    pub label: String,
    /// Value as visible at this resolution; empty when blanked by collision.
    pub value: String,
    /// Text-field focus is visible (caret), so it is part of the view.
    pub focused: bool,
}

/// What the agent (or a judge) sees: the active screen at some resolution.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Observation {
    pub resolution: Resolution,
    pub screen: String,
    pub views: Vec<WidgetView>,
}

impl Observation {
    pub fn view(&self, widget_id: &str) -> Option<&WidgetView> {
        self.views.iter().find(|v| v.id == widget_id)
    }

    /// Ids whose values were blanked because their quantized rectangles
    /// collide at this resolution. Recomputed from geometry, so a view can
    /// always distinguish "blank because hidden" from "genuinely empty".
    pub fn colliding_ids(&self) -> BTreeSet<String> {
        colliding(&self.views)
    }
}

fn colliding(views: &[WidgetView]) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    for (i, a) in views.iter().enumerate() {
        for b in views.iter().skip(i + 1) {
            if a.bbox.touches_or_overlaps(&b.bbox) {
                out.insert(a.id.clone());
                out.insert(b.id.clone());
            }
        }
    }
    out
}

/// Scale a native rectangle into the target resolution: floor the origin,
/// ceil the far corner. At scale 1 this is the identity.
pub fn quantize_rect(bbox: Rect, native: Resolution, target: Resolution) -> Rect {
    let sx = f64::from(target.w) / f64::from(native.w);
    let sy = f64::from(target.h) / f64::from(native.h);
    let x0 = (bbox.x as f64 * sx).floor() as i64;
    let y0 = (bbox.y as f64 * sy).floor() as i64;
    let x1 = ((bbox.x + bbox.w) as f64 * sx).ceil() as i64;
    let y1 = ((bbox.y + bbox.h) as f64 * sy).ceil() as i64;
    Rect::new(x0, y0, x1 - x0, y1 - y0)
}

/// Render the active screen at the requested resolution.
pub fn render(
    model: &SoftwareModel,
    state: &WorldState,
    resolution: Resolution,
) -> Result<Observation, EnvError> {
    if resolution.w < MIN_RENDER_WIDTH {
        return Err(EnvError::ResolutionTooSmall(resolution));
    }
    if resolution.w > model.native.w {
        return Err(EnvError::ResolutionTooLarge(resolution, model.native));
    }
    if !resolution.aspect_matches(model.native) {
        return Err(EnvError::AspectMismatch(resolution, model.native));
    }

    let mut views: Vec<WidgetView> = model
        .screen(&state.screen)
        .into_iter()
        .flat_map(|s| s.widgets.iter())
        .filter(|w| w.visible)
        .map(|w| WidgetView {
            id: w.id.clone(),
            kind: w.kind,
            bbox: quantize_rect(w.bbox, model.native, resolution),
            label: w.label.clone(),
            value: state.value(&w.id).to_string(),
            focused: w.kind == WidgetKind::TextField && state.focus.as_deref() == Some(&w.id),
        })
        .collect();

    let blanked = colliding(&views);
    for v in &mut views {
        if blanked.contains(&v.id) {
            v.value.clear();
        }
    }

    Ok(Observation {
        resolution,
        screen: state.screen.clone(),
        views,
    })
}

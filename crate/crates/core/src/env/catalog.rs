//! Built-in software models and their task templates.
//!
//! Four small applications with distinct widget vocabularies and transition
//! wiring: a plotting tool, a molecule workbench, a map viewer, and a sky
//! chart. All share a 1280x800 native resolution.

use std::collections::BTreeMap;

use crate::env::goal::{GoalAtom, SimpleAtom};
use crate::env::model::{
    DragRule, Effect, EnvCatalog, Screen, SoftwareModel, ValuePart, Widget, WidgetKind,
};
use crate::env::taskgen::{SlotDomain, SlotSpec, TaskTemplate};
use crate::geometry::{Rect, Resolution};

const NATIVE: Resolution = Resolution { w: 1280, h: 800 };

fn widget(id: &str, kind: WidgetKind, bbox: Rect, label: &str) -> Widget {
    Widget {
        id: id.into(),
        kind,
        bbox,
        label: label.into(),
        value: String::new(),
        visible: true,
    }
}

fn effects(list: &mut BTreeMap<String, Vec<Effect>>, id: &str, e: Vec<Effect>) {
    list.insert(id.to_string(), e);
}

fn navigate(screen: &str) -> Effect {
    Effect::Navigate {
        screen: screen.into(),
    }
}

fn set_value(widget: &str, value: &str) -> Effect {
    Effect::SetValue {
        widget: widget.into(),
        value: value.into(),
    }
}

fn compose(target: &str, parts: Vec<ValuePart>) -> Effect {
    Effect::Compose {
        target: target.into(),
        parts,
    }
}

fn lit(s: &str) -> ValuePart {
    ValuePart::Lit(s.into())
}

fn wv(id: &str) -> ValuePart {
    ValuePart::WidgetValue(id.into())
}

fn plotlab() -> SoftwareModel {
    let editor = Screen {
        id: "editor".into(),
        widgets: vec![
            widget("expr", WidgetKind::TextField, Rect::new(80, 80, 240, 48), "Expression"),
            widget("xmin", WidgetKind::TextField, Rect::new(80, 160, 240, 48), "X min"),
            widget("grid", WidgetKind::Toggle, Rect::new(80, 240, 160, 48), "Grid"),
            widget("plot", WidgetKind::Button, Rect::new(80, 320, 160, 48), "Plot"),
            widget("menu_view", WidgetKind::Menu, Rect::new(1040, 40, 160, 40), "View"),
        ],
    };
    let view = Screen {
        id: "view".into(),
        widgets: vec![
            widget("canvas", WidgetKind::Canvas, Rect::new(80, 120, 800, 560), "Canvas"),
            widget("status", WidgetKind::TextField, Rect::new(960, 120, 240, 48), "Status"),
            widget("export", WidgetKind::Button, Rect::new(960, 200, 160, 48), "Export"),
            widget("menu_editor", WidgetKind::Menu, Rect::new(1040, 40, 160, 40), "Editor"),
        ],
    };
    let mut click_effects = BTreeMap::new();
    effects(
        &mut click_effects,
        "plot",
        vec![
            compose("canvas", vec![lit("plot:"), wv("expr")]),
            navigate("view"),
        ],
    );
    effects(&mut click_effects, "export", vec![set_value("status", "exported")]);
    effects(&mut click_effects, "menu_view", vec![navigate("view")]);
    effects(&mut click_effects, "menu_editor", vec![navigate("editor")]);
    let mut hotkeys = BTreeMap::new();
    hotkeys.insert("ctrl+g".to_string(), vec![Effect::ToggleValue { widget: "grid".into() }]);
    SoftwareModel {
        name: "plotlab".into(),
        native: NATIVE,
        initial_screen: "editor".into(),
        screens: vec![editor, view],
        click_effects,
        double_click_effects: BTreeMap::new(),
        hotkeys,
        drag_rules: Vec::new(),
        value_vocabulary: vec!["sin(x)".into(), "cos(x)".into(), "x^2".into()],
    }
}

fn molforge() -> SoftwareModel {
    let build = Screen {
        id: "build".into(),
        widgets: vec![
            widget("formula", WidgetKind::TextField, Rect::new(80, 80, 240, 48), "Formula"),
            widget("search", WidgetKind::Button, Rect::new(80, 160, 160, 48), "Search"),
            widget("match_box", WidgetKind::TextField, Rect::new(80, 240, 240, 48), "Match"),
            widget("elem_c", WidgetKind::MenuItem, Rect::new(400, 80, 120, 40), "Carbon"),
            widget("elem_o", WidgetKind::MenuItem, Rect::new(400, 140, 120, 40), "Oxygen"),
            widget("elem_h", WidgetKind::MenuItem, Rect::new(400, 200, 120, 40), "Hydrogen"),
            widget("element", WidgetKind::TextField, Rect::new(400, 260, 140, 48), "Element"),
            widget("bond", WidgetKind::Button, Rect::new(400, 340, 140, 48), "Bond"),
            widget("molecule", WidgetKind::TextField, Rect::new(400, 420, 240, 48), "Molecule"),
            widget("bench", WidgetKind::Canvas, Rect::new(700, 80, 400, 400), "Bench"),
            widget("menu_settings", WidgetKind::Menu, Rect::new(1060, 20, 160, 40), "Settings"),
        ],
    };
    let settings = Screen {
        id: "settings".into(),
        widgets: vec![
            widget("hydro", WidgetKind::Toggle, Rect::new(80, 80, 220, 48), "Show Hydrogens"),
            widget("threed", WidgetKind::Toggle, Rect::new(80, 160, 220, 48), "3D View"),
            widget("menu_build", WidgetKind::Menu, Rect::new(1060, 20, 160, 40), "Build"),
        ],
    };
    let mut click_effects = BTreeMap::new();
    effects(
        &mut click_effects,
        "search",
        vec![compose("match_box", vec![lit("hit:"), wv("formula")])],
    );
    effects(&mut click_effects, "elem_c", vec![set_value("element", "C")]);
    effects(&mut click_effects, "elem_o", vec![set_value("element", "O")]);
    effects(&mut click_effects, "elem_h", vec![set_value("element", "H")]);
    let bond_effect = compose("molecule", vec![wv("element"), lit("-"), wv("element")]);
    effects(&mut click_effects, "bond", vec![bond_effect.clone()]);
    effects(&mut click_effects, "menu_settings", vec![navigate("settings")]);
    effects(&mut click_effects, "menu_build", vec![navigate("build")]);
    let mut hotkeys = BTreeMap::new();
    hotkeys.insert("ctrl+b".to_string(), vec![bond_effect]);
    SoftwareModel {
        name: "molforge".into(),
        native: NATIVE,
        initial_screen: "build".into(),
        screens: vec![build, settings],
        click_effects,
        double_click_effects: BTreeMap::new(),
        hotkeys,
        drag_rules: Vec::new(),
        value_vocabulary: vec!["C6H6".into(), "H2O".into(), "NaCl".into()],
    }
}

fn terraview() -> SoftwareModel {
    let map = Screen {
        id: "map".into(),
        widgets: vec![
            {
                let mut w = widget(
                    "coords",
                    WidgetKind::TextField,
                    Rect::new(80, 80, 240, 48),
                    "Coordinates",
                );
                w.value = "0,0".into();
                w
            },
            widget("locate", WidgetKind::Button, Rect::new(80, 160, 160, 48), "Locate"),
            widget("pin", WidgetKind::TextField, Rect::new(80, 240, 240, 48), "Pin"),
            widget("map_canvas", WidgetKind::Canvas, Rect::new(400, 80, 600, 480), "Map"),
            widget("menu_layers", WidgetKind::Menu, Rect::new(1060, 20, 160, 40), "Layers"),
        ],
    };
    let layers = Screen {
        id: "layers".into(),
        widgets: vec![
            widget("roads", WidgetKind::Toggle, Rect::new(80, 80, 200, 48), "Roads"),
            widget("rivers", WidgetKind::Toggle, Rect::new(80, 160, 200, 48), "Rivers"),
            widget("terrain", WidgetKind::Toggle, Rect::new(80, 240, 200, 48), "Terrain"),
            widget("menu_map", WidgetKind::Menu, Rect::new(1060, 20, 160, 40), "Map"),
        ],
    };
    let mut click_effects = BTreeMap::new();
    effects(
        &mut click_effects,
        "locate",
        vec![compose("pin", vec![lit("pin:"), wv("coords")])],
    );
    effects(&mut click_effects, "menu_layers", vec![navigate("layers")]);
    effects(&mut click_effects, "menu_map", vec![navigate("map")]);
    let mut hotkeys = BTreeMap::new();
    hotkeys.insert("ctrl+l".to_string(), vec![navigate("layers")]);
    SoftwareModel {
        name: "terraview".into(),
        native: NATIVE,
        initial_screen: "map".into(),
        screens: vec![map, layers],
        click_effects,
        double_click_effects: BTreeMap::new(),
        hotkeys,
        drag_rules: vec![DragRule {
            source: "map_canvas".into(),
            dest: "map_canvas".into(),
            effects: vec![set_value("map_canvas", "panned")],
        }],
        value_vocabulary: vec!["51.5,-0.1".into(), "40.7,-74.0".into(), "35.7,139.7".into()],
    }
}

fn skychart() -> SoftwareModel {
    let sky = Screen {
        id: "sky".into(),
        widgets: vec![
            widget("target", WidgetKind::TextField, Rect::new(80, 80, 240, 48), "Target"),
            widget("goto", WidgetKind::Button, Rect::new(80, 160, 160, 48), "Go To"),
            widget("track_status", WidgetKind::TextField, Rect::new(80, 240, 240, 48), "Tracking"),
            widget("labels", WidgetKind::Toggle, Rect::new(80, 320, 200, 48), "Labels"),
            widget("sky_canvas", WidgetKind::Canvas, Rect::new(400, 80, 600, 480), "Sky"),
            widget("menu_catalog", WidgetKind::Menu, Rect::new(1060, 20, 160, 40), "Catalog"),
        ],
    };
    let catalog = Screen {
        id: "catalog".into(),
        widgets: vec![
            widget("obj_mars", WidgetKind::MenuItem, Rect::new(80, 80, 140, 40), "Mars"),
            widget("obj_vega", WidgetKind::MenuItem, Rect::new(80, 140, 140, 40), "Vega"),
            widget("obj_m31", WidgetKind::MenuItem, Rect::new(80, 200, 140, 40), "Andromeda"),
            widget("menu_sky", WidgetKind::Menu, Rect::new(1060, 20, 160, 40), "Sky"),
        ],
    };
    let mut click_effects = BTreeMap::new();
    effects(
        &mut click_effects,
        "goto",
        vec![compose("track_status", vec![lit("tracking:"), wv("target")])],
    );
    effects(
        &mut click_effects,
        "obj_mars",
        vec![set_value("target", "Mars"), navigate("sky")],
    );
    effects(
        &mut click_effects,
        "obj_vega",
        vec![set_value("target", "Vega"), navigate("sky")],
    );
    effects(
        &mut click_effects,
        "obj_m31",
        vec![set_value("target", "M31"), navigate("sky")],
    );
    effects(&mut click_effects, "menu_catalog", vec![navigate("catalog")]);
    effects(&mut click_effects, "menu_sky", vec![navigate("sky")]);
    let mut hotkeys = BTreeMap::new();
    hotkeys.insert("ctrl+t".to_string(), vec![Effect::ToggleValue { widget: "labels".into() }]);
    SoftwareModel {
        name: "skychart".into(),
        native: NATIVE,
        initial_screen: "sky".into(),
        screens: vec![sky, catalog],
        click_effects,
        double_click_effects: BTreeMap::new(),
        hotkeys,
        drag_rules: Vec::new(),
        value_vocabulary: vec!["Mars".into(), "Vega".into(), "M31".into()],
    }
}

/// The four built-in applications.
pub fn builtin_catalog() -> EnvCatalog {
    EnvCatalog::new([plotlab(), molforge(), terraview(), skychart()])
}

fn slot(name: &str, domain: SlotDomain) -> SlotSpec {
    SlotSpec {
        name: name.into(),
        domain,
    }
}

fn value_eq(widget: &str, value: &str) -> GoalAtom {
    GoalAtom::WidgetValueEquals {
        widget: widget.into(),
        value: value.into(),
    }
}

fn screen_is(screen: &str) -> GoalAtom {
    GoalAtom::ScreenIs {
        screen: screen.into(),
    }
}

fn toggle_on(widget: &str) -> GoalAtom {
    GoalAtom::ToggleStateIs {
        widget: widget.into(),
        on: true,
    }
}

fn table(rows: &[&[(&str, &str)]]) -> SlotDomain {
    SlotDomain::Table {
        rows: rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|(k, v)| ((*k).to_string(), (*v).to_string()))
                    .collect()
            })
            .collect(),
    }
}

/// Task templates for one built-in application.
pub fn builtin_templates(software: &str) -> Vec<TaskTemplate> {
    match software {
        "plotlab" => vec![
            TaskTemplate {
                id: "plotlab/plot_expr".into(),
                software: "plotlab".into(),
                instruction: "Type \"{v}\" into the Expression field, then press Plot to draw it."
                    .into(),
                goal: vec![value_eq("canvas", "plot:{v}"), screen_is("view")],
                slots: vec![slot("v", SlotDomain::VocabValue)],
            },
            TaskTemplate {
                id: "plotlab/set_field".into(),
                software: "plotlab".into(),
                instruction: "Set the {f.label} field to \"{v}\" and stay in the editor.".into(),
                goal: vec![value_eq("{f}", "{v}"), screen_is("editor")],
                slots: vec![
                    slot(
                        "f",
                        SlotDomain::WidgetOfKind {
                            kind: WidgetKind::TextField,
                            screen: Some("editor".into()),
                        },
                    ),
                    slot("v", SlotDomain::VocabValue),
                ],
            },
            TaskTemplate {
                id: "plotlab/enable_grid".into(),
                software: "plotlab".into(),
                instruction: "Enable the Grid option in the editor.".into(),
                goal: vec![toggle_on("grid"), screen_is("editor")],
                slots: vec![],
            },
            TaskTemplate {
                id: "plotlab/export_view".into(),
                software: "plotlab".into(),
                instruction: "Open the View screen and press Export.".into(),
                goal: vec![value_eq("status", "exported"), screen_is("view")],
                slots: vec![],
            },
            TaskTemplate {
                id: "plotlab/peek_view".into(),
                software: "plotlab".into(),
                instruction: "Peek at the View screen, then come back to the editor.".into(),
                goal: vec![
                    GoalAtom::OrderedSubgoals {
                        atoms: vec![
                            SimpleAtom::ScreenIs { screen: "view".into() },
                            SimpleAtom::ScreenIs { screen: "editor".into() },
                        ],
                    },
                    screen_is("editor"),
                ],
                slots: vec![],
            },
        ],
        "molforge" => vec![
            TaskTemplate {
                id: "molforge/search_formula".into(),
                software: "molforge".into(),
                instruction: "Search for \"{v}\": put it in the Formula field and press Search."
                    .into(),
                goal: vec![value_eq("match_box", "hit:{v}"), screen_is("build")],
                slots: vec![slot("v", SlotDomain::VocabValue)],
            },
            TaskTemplate {
                id: "molforge/pick_element".into(),
                software: "molforge".into(),
                instruction: "Select {e.label} from the element list.".into(),
                goal: vec![value_eq("element", "{e.val}"), screen_is("build")],
                slots: vec![slot(
                    "e",
                    table(&[
                        &[("id", "elem_c"), ("label", "Carbon"), ("val", "C")],
                        &[("id", "elem_o"), ("label", "Oxygen"), ("val", "O")],
                        &[("id", "elem_h"), ("label", "Hydrogen"), ("val", "H")],
                    ]),
                )],
            },
            TaskTemplate {
                id: "molforge/bond_element".into(),
                software: "molforge".into(),
                instruction: "Choose {e.label} as the element, then press Bond.".into(),
                goal: vec![value_eq("molecule", "{e.val}-{e.val}"), screen_is("build")],
                slots: vec![slot(
                    "e",
                    table(&[
                        &[("id", "elem_c"), ("label", "Carbon"), ("val", "C")],
                        &[("id", "elem_o"), ("label", "Oxygen"), ("val", "O")],
                        &[("id", "elem_h"), ("label", "Hydrogen"), ("val", "H")],
                    ]),
                )],
            },
            TaskTemplate {
                id: "molforge/toggle_setting".into(),
                software: "molforge".into(),
                instruction: "In Settings, enable {t.label}.".into(),
                goal: vec![toggle_on("{t}"), screen_is("settings")],
                slots: vec![slot(
                    "t",
                    SlotDomain::WidgetOfKind {
                        kind: WidgetKind::Toggle,
                        screen: Some("settings".into()),
                    },
                )],
            },
            TaskTemplate {
                id: "molforge/mark_bench".into(),
                software: "molforge".into(),
                instruction: "Click somewhere on the Bench canvas to place a fragment.".into(),
                goal: vec![value_eq("bench", "marked"), screen_is("build")],
                slots: vec![],
            },
        ],
        "terraview" => vec![
            TaskTemplate {
                id: "terraview/locate".into(),
                software: "terraview".into(),
                instruction: "Locate \"{v}\": enter it in the Coordinates field and press Locate."
                    .into(),
                goal: vec![value_eq("pin", "pin:{v}"), screen_is("map")],
                slots: vec![slot("v", SlotDomain::VocabValue)],
            },
            TaskTemplate {
                id: "terraview/enable_layer".into(),
                software: "terraview".into(),
                instruction: "Enable the {t.label} layer.".into(),
                goal: vec![toggle_on("{t}"), screen_is("layers")],
                slots: vec![slot(
                    "t",
                    SlotDomain::WidgetOfKind {
                        kind: WidgetKind::Toggle,
                        screen: Some("layers".into()),
                    },
                )],
            },
            TaskTemplate {
                id: "terraview/pan_map".into(),
                software: "terraview".into(),
                instruction: "Pan the view by dragging the Map canvas.".into(),
                goal: vec![value_eq("map_canvas", "panned"), screen_is("map")],
                slots: vec![],
            },
            TaskTemplate {
                id: "terraview/clear_coords".into(),
                software: "terraview".into(),
                instruction: "Clear the Coordinates field with a double-click.".into(),
                goal: vec![value_eq("coords", ""), screen_is("map")],
                slots: vec![],
            },
            TaskTemplate {
                id: "terraview/peek_layers".into(),
                software: "terraview".into(),
                instruction: "Check the Layers page, then return to the Map.".into(),
                goal: vec![
                    GoalAtom::OrderedSubgoals {
                        atoms: vec![
                            SimpleAtom::ScreenIs { screen: "layers".into() },
                            SimpleAtom::ScreenIs { screen: "map".into() },
                        ],
                    },
                    screen_is("map"),
                ],
                slots: vec![],
            },
        ],
        "skychart" => vec![
            TaskTemplate {
                id: "skychart/goto_target".into(),
                software: "skychart".into(),
                instruction:
                    "Aim at \"{v}\": type it into the Target field and press Go To.".into(),
                goal: vec![value_eq("track_status", "tracking:{v}"), screen_is("sky")],
                slots: vec![slot("v", SlotDomain::VocabValue)],
            },
            TaskTemplate {
                id: "skychart/pick_object".into(),
                software: "skychart".into(),
                instruction: "Select {o.label} in the catalog.".into(),
                goal: vec![value_eq("target", "{o.val}"), screen_is("sky")],
                slots: vec![slot(
                    "o",
                    table(&[
                        &[("id", "obj_mars"), ("label", "Mars"), ("val", "Mars")],
                        &[("id", "obj_vega"), ("label", "Vega"), ("val", "Vega")],
                        &[("id", "obj_m31"), ("label", "Andromeda"), ("val", "M31")],
                    ]),
                )],
            },
            TaskTemplate {
                id: "skychart/toggle_labels".into(),
                software: "skychart".into(),
                instruction: "Switch star labels on.".into(),
                goal: vec![toggle_on("labels"), screen_is("sky")],
                slots: vec![],
            },
            TaskTemplate {
                id: "skychart/track_object".into(),
                software: "skychart".into(),
                instruction: "Select {o.label} in the catalog, then press Go To to track it."
                    .into(),
                goal: vec![
                    value_eq("track_status", "tracking:{o.val}"),
                    screen_is("sky"),
                ],
                slots: vec![slot(
                    "o",
                    table(&[
                        &[("id", "obj_mars"), ("label", "Mars"), ("val", "Mars")],
                        &[("id", "obj_vega"), ("label", "Vega"), ("val", "Vega")],
                        &[("id", "obj_m31"), ("label", "Andromeda"), ("val", "M31")],
                    ]),
                )],
            },
            TaskTemplate {
                id: "skychart/mark_sky".into(),
                software: "skychart".into(),
                instruction: "Click the Sky canvas to drop a reference marker.".into(),
                goal: vec![value_eq("sky_canvas", "marked"), screen_is("sky")],
                slots: vec![],
            },
        ],
        _ => Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_has_four_distinct_apps() {
        let catalog = builtin_catalog();
        let names: Vec<&str> = catalog.names().collect();
        assert_eq!(names.len(), 4);
        for name in names {
            assert!(!builtin_templates(name).is_empty(), "no templates for {name}");
        }
    }

    #[test]
    fn templates_reference_their_software() {
        let catalog = builtin_catalog();
        for name in catalog.names() {
            for t in builtin_templates(name) {
                assert_eq!(t.software, name);
            }
        }
    }
}

//! SVG rendering of an interpretation model: symmetric structure in green,
//! non-symmetric in red, unmatched elements dotted grey, the axis dashed.

use std::fmt::Write;

use crate::descriptor::ElementDescriptor;
use crate::geometry::{center, Rect};
use crate::interpretation::InterpretationModel;
use crate::symmetry::BodyPart;

const SYMMETRIC: &str = "#2ca02c";
const NON_SYMMETRIC: &str = "#d62728";
const UNMATCHED: &str = "#7f7f7f";

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn rect(out: &mut String, r: &Rect, colour: &str, dash: Option<&str>, title: &str) {
    let dash = dash
        .map(|d| format!(" stroke-dasharray=\"{d}\""))
        .unwrap_or_default();
    let _ = writeln!(
        out,
        "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"{colour}\" stroke-width=\"2\"{dash}><title>{}</title></rect>",
        r.x,
        r.y,
        r.w,
        r.h,
        escape(title)
    );
}

fn part_colour(joint: &str) -> &'static str {
    match BodyPart::of_joint(joint) {
        Some(BodyPart::UpperBody) => "#1f77b4",
        Some(BodyPart::Legs) => "#ff7f0e",
        _ => "#9467bd",
    }
}

fn joints(out: &mut String, e: &ElementDescriptor) {
    let Some(pose) = &e.pose else { return };
    for (name, j) in &pose.joints {
        let _ = writeln!(
            out,
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"3\" fill=\"{}\"><title>{}</title></circle>",
            j.x,
            j.y,
            part_colour(name),
            escape(&format!("{}:{name}", e.id))
        );
    }
}

/// Renders the model. `background` is referenced, not embedded.
pub fn render_svg(m: &InterpretationModel, background: Option<&str>) -> String {
    let (w, h) = (m.axis.image_width, m.axis.image_height);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" xmlns:xlink=\"http://www.w3.org/1999/xlink\" viewBox=\"0 0 {w} {h}\" width=\"{w}\" height=\"{h}\">"
    );
    let _ = writeln!(out, "  <title>{}</title>", escape(&m.image_id));
    if let Some(bg) = background {
        let _ = writeln!(
            out,
            "  <image href=\"{0}\" xlink:href=\"{0}\" x=\"0\" y=\"0\" width=\"{w}\" height=\"{h}\"/>",
            escape(bg)
        );
    }
    let _ = writeln!(
        out,
        "  <line x1=\"{0:.2}\" y1=\"0\" x2=\"{0:.2}\" y2=\"{h}\" stroke=\"#000000\" stroke-width=\"1.5\" stroke-dasharray=\"8 6\"><title>symmetry axis</title></line>",
        m.axis.x
    );

    for p in &m.pairs {
        let colour = if p.symmetric {
            SYMMETRIC
        } else {
            NON_SYMMETRIC
        };
        let (l, r) = (&m.elements[&p.left_id], &m.elements[&p.right_id]);
        let (cl, cr) = (center(&l.bbox), center(&r.bbox));
        let _ = writeln!(
            out,
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"{colour}\" stroke-width=\"1\"><title>{}</title></line>",
            cl.x,
            cl.y,
            cr.x,
            cr.y,
            escape(&format!("{} - {} (divergence {:.3})", p.left_id, p.right_id, p.divergence.mean))
        );
        rect(&mut out, &l.bbox, colour, None, &l.id);
        rect(&mut out, &r.bbox, colour, None, &r.id);
    }
    for s in &m.singles {
        let colour = if s.symmetric {
            SYMMETRIC
        } else {
            NON_SYMMETRIC
        };
        rect(
            &mut out,
            &m.elements[&s.element_id].bbox,
            colour,
            None,
            &s.element_id,
        );
    }
    for id in &m.unmatched {
        rect(&mut out, &m.elements[id].bbox, UNMATCHED, Some("2 3"), id);
    }
    for e in m.elements.values() {
        joints(&mut out, e);
    }
    out.push_str("</svg>\n");
    out
}

//! Example networks shipped with the tool. On the command line they are
//! addressed as `fixture:<name>`.

pub const ALL: [(&str, &str); 6] = [
    ("single_edge", include_str!("../fixtures/single_edge.json")),
    ("butterfly", include_str!("../fixtures/butterfly.json")),
    ("song11", include_str!("../fixtures/song11.json")),
    ("kamath11", include_str!("../fixtures/kamath11.json")),
    ("char2", include_str!("../fixtures/char2.json")),
    ("cyclic", include_str!("../fixtures/cyclic.json")),
];

/// Fixtures that pass validation.
pub const VALID: [&str; 5] = ["single_edge", "butterfly", "song11", "kamath11", "char2"];

pub fn get(name: &str) -> Option<&'static str> {
    ALL.iter().find(|(n, _)| *n == name).map(|(_, t)| *t)
}

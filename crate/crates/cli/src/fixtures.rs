//! Species files compiled into the binary for `selftest`.

pub const SPECIES: [(&str, &str); 4] = [
    ("matrix3", include_str!("../fixtures/matrix3.json")),
    ("rods_line", include_str!("../fixtures/rods_line.json")),
    ("disks", include_str!("../fixtures/disks.json")),
    ("rods2d", include_str!("../fixtures/rods2d.json")),
];

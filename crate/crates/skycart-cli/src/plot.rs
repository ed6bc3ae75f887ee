//! Emission of a self-contained matplotlib script for exported trajectories.

use std::io;
use std::path::Path;

/// Write a plotting script with a states panel (x, alpha, theta) and an
/// inputs panel (u1, u2, u3). One CSV gives a single run; two CSVs are
/// overlaid (second run dashed), which is how the governed and ungoverned
/// variants of the same scenario are compared.
pub fn emit_plot_script(csv_paths: &[&Path], out: &Path) -> io::Result<()> {
    if csv_paths.is_empty() || csv_paths.len() > 2 {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            "expected one or two CSV paths",
        ));
    }
    for p in csv_paths {
        if !p.exists() {
            return Err(io::Error::new(
                io::ErrorKind::NotFound,
                format!("CSV not found: {}", p.display()),
            ));
        }
    }

    let mut loads = String::new();
    for (i, p) in csv_paths.iter().enumerate() {
        loads.push_str(&format!(
            "runs.append((np.genfromtxt({:?}, delimiter=\",\", names=True), {}))\n",
            p.display().to_string(),
            if i == 0 { "\"-\"" } else { "\"--\"" },
        ));
    }

    let script = format!(
        r#"#!/usr/bin/env python3
# States and inputs of a logged run (two runs overlay: second dashed).
import numpy as np
import matplotlib.pyplot as plt

runs = []
{loads}
fig, (ax_states, ax_inputs) = plt.subplots(2, 1, sharex=True, figsize=(9, 7))

for data, style in runs:
    t = data["t"]
    ax_states.plot(t, data["x"], "C0" + style, label="x [m]" if style == "-" else None)
    ax_states.plot(t, data["alpha"], "C1" + style, label="alpha [rad]" if style == "-" else None)
    ax_states.plot(t, data["beta"] - data["alpha"], "C2" + style,
                   label="theta [rad]" if style == "-" else None)
    ax_states.plot(t, data["ref_alpha"], "C1:", linewidth=0.8,
                   label="applied alpha ref" if style == "-" else None)
    ax_states.plot(t, data["ref_x"], "C0:", linewidth=0.8,
                   label="applied x ref" if style == "-" else None)
    ax_inputs.plot(t, data["u1"], "C0" + style, label="u1 [N]" if style == "-" else None)
    ax_inputs.plot(t, data["u2"], "C1" + style, label="u2 [Nm]" if style == "-" else None)
    ax_inputs.plot(t, data["u3"], "C2" + style, label="u3 [N]" if style == "-" else None)

ax_states.set_ylabel("states")
ax_states.legend(loc="best", fontsize=8)
ax_states.grid(alpha=0.3)
ax_inputs.set_xlabel("t [s]")
ax_inputs.set_ylabel("inputs")
ax_inputs.legend(loc="best", fontsize=8)
ax_inputs.grid(alpha=0.3)
fig.tight_layout()
plt.show()
"#
    );
    std::fs::write(out, script)
}

"""How weights shape a movement primitive.

Rolls out a few 5-DOF primitives with different weight matrices and plots
the effect: the attractor always lands on the goal, while weights bend
the path in between and schedule the gripper's open/close crossing.

Run from the repository root:  python3 demos/01_primitive_shaping.py
"""

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from deskprim.dmp import (
    DEFAULT_CONFIG,
    GRIP,
    gripper_crossing_phase,
    make_basis,
    rollout,
    specs_from_weights,
)

cfg = DEFAULT_CONFIG
start = np.array([0.30, -0.10, 0.25, 0.0, 0.0])
goal = np.array([0.60, 0.15, 0.10, 0.5, 1.0])

# 1) the basis families and the canonical decay gate
basis = make_basis("gaussian", cfg.basis_count)
phases = np.linspace(0, 1, 400)
activations = basis.evaluate_many(phases)
decay = np.exp(-cfg.decay_rate * phases**3)

fig, axes = plt.subplots(2, 2, figsize=(11, 7))
ax = axes[0, 0]
ax.plot(phases, activations, lw=0.9)
ax.plot(phases, decay, "k--", lw=2, label="decay gate z")
ax.set_title("Gaussian bases and the decay gate")
ax.set_xlabel("phase")
ax.legend()

# 2) bending the path: zero weights vs a lateral bump vs a lift
variants = {
    "zero weights": np.zeros((5, 11)),
}
bump = np.zeros((5, 11))
bump[1, 2:6] = 0.8  # push +y early-mid
variants["y bump"] = bump
lift = np.zeros((5, 11))
lift[2, 1:7] = 0.9  # lift z through the middle
variants["z lift"] = lift

ax = axes[0, 1]
for name, w in variants.items():
    traj = rollout(specs_from_weights(w, start, goal, cfg), cfg.dt, cfg)
    ax.plot(traj.poses[:, 0], traj.poses[:, 1], label=name)
ax.plot(*start[:2], "o", color="k")
ax.plot(*goal[:2], "x", color="k")
ax.set_title("top-down path: same endpoints, different shapes")
ax.set_xlabel("x [m]")
ax.set_ylabel("y [m]")
ax.legend()

ax = axes[1, 0]
for name, w in variants.items():
    traj = rollout(specs_from_weights(w, start, goal, cfg), cfg.dt, cfg)
    ax.plot(traj.times, traj.poses[:, 2], label=name)
ax.set_title("z over time: the lift clears an obstacle, then converges")
ax.set_xlabel("t [s]")
ax.legend()

# 3) gripper crossing control: the continuous gripper signal and when it
# crosses the close threshold
grip_variants = {
    "close immediately": [0.0] * 11,
    "hold, close around 3/4": [-1, -1, -0.5, -0.5, -0.5, -0.5, -0.5, 0.5, 0.2, 0, 0],
    "close at the very end": [-1] * 10 + [1],
}
ax = axes[1, 1]
for name, grip in grip_variants.items():
    w = np.zeros((5, 11))
    w[GRIP] = grip
    traj = rollout(specs_from_weights(w, start, goal, cfg), cfg.dt, cfg)
    crossing = gripper_crossing_phase(traj, cfg.gripper_threshold)
    ax.plot(traj.phases, traj.poses[:, GRIP],
            label=f"{name} (crossing {crossing:.2f})")
ax.axhline(cfg.gripper_threshold, color="k", ls=":", lw=1)
ax.set_title("gripper signal vs phase")
ax.set_xlabel("phase")
ax.legend(fontsize=8)

fig.tight_layout()
fig.savefig("demo01_primitive_shaping.png", dpi=110)
print("wrote demo01_primitive_shaping.png")
for name, grip in grip_variants.items():
    w = np.zeros((5, 11))
    w[GRIP] = grip
    traj = rollout(specs_from_weights(w, start, goal, cfg), cfg.dt, cfg)
    print(f"  {name:28s} -> crossing phase "
          f"{gripper_crossing_phase(traj, cfg.gripper_threshold)}")

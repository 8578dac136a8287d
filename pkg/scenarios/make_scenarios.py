"""Regenerates the frozen scenario suite (scenes + scripted fixtures).

Each scenario is a scene file plus a sequence-mode fixture replaying the
decomposer/generator exchanges of one task. Weights were tuned against
the simulator; rerun this script only if the engine's gains change, then
re-verify with the acceptance suite.
"""

import json
from pathlib import Path

HERE = Path(__file__).parent
SCENES = HERE / "scenes"
FIXTURES = HERE / "fixtures"

WORKSPACE = {"min": [0.15, -0.45, 0.0], "max": [0.85, 0.45, 0.6]}
EE_HOME = [0.45, 0.0, 0.35, 0.0, 0.0, 0.0]

GRIP_LATE = [-1, -1, -0.5, -0.5, -0.5, -0.5, -0.5, 0.5, 0.2, 0, 0]
ZEROS = [0.0] * 11


def obj(label, x, y, extents, yaw=0.0, z=None, flags=("graspable",)):
    if z is None:
        z = extents[2] / 2.0
    return {"label": label, "position": [x, y, z], "yaw": yaw,
            "extents": list(extents), "flags": sorted(flags)}


def scene(objects, table_height=0.0):
    return {"table_height": table_height, "workspace": WORKSPACE,
            "ee_home": EE_HOME, "objects": objects}


def answer(text):
    return {"match": "seq", "response": f"<answer>{text}</answer>"}


def gen(x=None, y=None, z=None, yaw=None, grip=None, angle=0.0, height=0.0):
    weights = [list(r) if r is not None else list(ZEROS)
               for r in (x, y, z, yaw, grip)]
    return {"match": "seq",
            "response": json.dumps({"weights": weights, "angle": angle,
                                    "height": height})}


def grasp_height(extents):
    # tool point one centimeter above the object's top face
    return extents[2] / 2.0 + 0.01


SCENARIOS = {}


def scenario(name, task, scene_doc, fixture, judge="accept"):
    SCENARIOS[name] = {"task": task, "scene": scene_doc, "fixture": fixture,
                       "judge": judge}


# -- spatial reasoning: picks ------------------------------------------------

chip_bags = scene([
    obj("blue chip bag", 0.45, -0.25, (0.12, 0.08, 0.05)),
    obj("red chip bag", 0.45, 0.25, (0.12, 0.08, 0.05)),
    obj("soda can", 0.62, 0.0, (0.07, 0.07, 0.12)),
])
scenario(
    "pick_leftmost", "pick the chip bag on the left of the table", chip_bags,
    [
        answer("REACH(blue chip bag)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.12, 0.08, 0.05))),
        answer("DONE"),
    ],
)

cans = scene([
    obj("green can", 0.50, -0.20, (0.07, 0.07, 0.12)),
    obj("silver can", 0.55, 0.02, (0.07, 0.07, 0.12)),
    obj("black can", 0.50, 0.26, (0.07, 0.07, 0.12)),
])
scenario(
    "pick_rightmost", "pick the rightmost can", cans,
    [
        answer("REACH(black can)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.07, 0.07, 0.12))),
        answer("DONE"),
    ],
)

# -- carry near ----------------------------------------------------------------

fruit = scene([
    obj("banana", 0.40, -0.15, (0.16, 0.04, 0.04), yaw=0.4),
    obj("pear", 0.55, 0.18, (0.06, 0.06, 0.07)),
])
scenario(
    "carry_near", "move the banana near the pear", fruit,
    [
        answer("REACH(banana)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.16, 0.04, 0.04))),
        answer("CARRY(banana) to (pear)"),
        gen(height=0.12, angle=0.4),
        answer("DONE"),
    ],
)

# -- carry with obstacle -------------------------------------------------------

fruit_obstacle = scene([
    obj("banana", 0.40, -0.15, (0.16, 0.04, 0.04), yaw=0.4),
    obj("pear", 0.55, 0.18, (0.06, 0.06, 0.07)),
    obj("bottle", 0.48, 0.02, (0.05, 0.05, 0.16), flags=("obstacle",)),
])
CARRY_AVOID = ("CARRY(banana) to (pear), Potential collision with bottle, "
               "avoid by lifting upward and shifting left.")
_carry_lift = dict(
    z=[0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.3, 0.0, 0.0, 0.0],
    y=[-0.5, -0.5, -0.5, -0.5, -0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
    height=0.12, angle=0.4,
)
scenario(
    "carry_obstacle", "move the banana near the pear", fruit_obstacle,
    [
        answer("REACH(banana)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.16, 0.04, 0.04))),
        answer(CARRY_AVOID),
        gen(**_carry_lift),
        answer("DONE"),
    ],
)
scenario(
    "carry_obstacle_zero", "move the banana near the pear", fruit_obstacle,
    [
        answer("REACH(banana)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.16, 0.04, 0.04))),
        answer(CARRY_AVOID),
        gen(height=0.12, angle=0.4),
        answer("DONE"),
    ],
)

# -- containers ------------------------------------------------------------

apple_bowl = scene([
    obj("apple", 0.35, 0.15, (0.06, 0.06, 0.07)),
    obj("bowl", 0.60, -0.12, (0.16, 0.16, 0.06), flags=("container",)),
])
scenario(
    "place_in_container", "place the apple in the bowl", apple_bowl,
    [
        answer("REACH(apple)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.06, 0.06, 0.07))),
        answer("CARRY(apple) to (bowl)"),
        gen(height=0.18),
        answer("RELEASE(apple)"),
        gen(),
        answer("DONE"),
    ],
)

bowl_apple_inside = scene([
    obj("bowl", 0.55, 0.10, (0.16, 0.16, 0.06), flags=("container",)),
    obj("apple", 0.55, 0.10, (0.06, 0.06, 0.07), z=0.045),
    obj("coaster", 0.35, -0.20, (0.12, 0.12, 0.01), flags=("surface",)),
])
scenario(
    "pick_from_container",
    "pick the apple from the bowl and place it on the coaster", bowl_apple_inside,
    [
        answer("REACH(apple)"),
        gen(grip=GRIP_LATE, height=0.045 + 0.035 + 0.01 - 0.045),  # top + 1 cm, relative to center
        answer("CARRY(apple) to (coaster)"),
        gen(height=0.12),
        answer("RELEASE(apple)"),
        gen(),
        answer("DONE"),
    ],
)

# -- wiping ----------------------------------------------------------------

plate_sponge = scene([
    obj("plate", 0.55, 0.20, (0.20, 0.20, 0.02), flags=("surface",)),
    obj("sponge", 0.40, -0.10, (0.12, 0.08, 0.02), yaw=0.3),
])
_swirl_x = [0.0, 0.6, 0.9, 0.2, -0.8, -0.6, 0.5, 0.8, 0.0, 0.0, 0.0]
_swirl_y = [0.0, -0.8, -0.2, 0.8, 0.4, -0.6, -0.8, 0.2, 0.0, 0.0, 0.0]
scenario(
    "wipe", "wipe the plate", plate_sponge,
    [
        answer("REACH(sponge)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.12, 0.08, 0.02)), angle=0.0),
        answer("CARRY(sponge) to (plate)"),
        gen(height=0.08, angle=0.3),
        answer("WIPING(plate)"),
        gen(x=_swirl_x, y=_swirl_y, height=0.05, angle=0.3),
        answer("DONE"),
    ],
)

# -- drop into cup -----------------------------------------------------------

ball_cup = scene([
    obj("ball", 0.35, -0.20, (0.04, 0.04, 0.04)),
    obj("cup", 0.62, 0.15, (0.09, 0.09, 0.12), flags=("container",)),
])
scenario(
    "drop_into_cup", "drop the ball into the cup", ball_cup,
    [
        answer("REACH(ball)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.04, 0.04, 0.04))),
        answer("CARRY(ball) to (cup)"),
        gen(height=0.20),
        answer("RELEASE(ball)"),
        gen(),
        answer("DONE"),
    ],
)

ball_cup_obstacle = scene([
    obj("ball", 0.35, -0.20, (0.04, 0.04, 0.04)),
    obj("cup", 0.62, 0.15, (0.09, 0.09, 0.12), flags=("container",)),
    obj("juice box", 0.55, 0.05, (0.06, 0.06, 0.20), flags=("obstacle",)),
])
DROP_AVOID = ("CARRY(ball) to (cup), Potential collision with juice box, "
              "avoid by lifting upward and shifting right.")
_drop_lift = dict(
    z=[0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.3, 0.0, 0.0, 0.0],
    y=[0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
    height=0.20,
)
scenario(
    "drop_into_cup_obstacle", "drop the ball into the cup", ball_cup_obstacle,
    [
        answer("REACH(ball)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.04, 0.04, 0.04))),
        answer(DROP_AVOID),
        gen(**_drop_lift),
        answer("RELEASE(ball)"),
        gen(),
        answer("DONE"),
    ],
)

# refinement loop: first carry attempt ships zero weights and collides, the
# rule judge feeds back, the retry ships the avoidance weights
scenario(
    "refine_drop_into_cup", "drop the ball into the cup", ball_cup_obstacle,
    [
        answer("REACH(ball)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.04, 0.04, 0.04))),
        answer(DROP_AVOID),
        gen(height=0.20),          # attempt 1: straight line, hits the juice box
        gen(**_drop_lift),         # attempt 2 after feedback
        answer("RELEASE(ball)"),
        gen(),
        answer("DONE"),
    ],
    judge="rules",
)

# -- put on plate -------------------------------------------------------------

banana_plate = scene([
    obj("banana", 0.38, -0.18, (0.16, 0.04, 0.04), yaw=0.2),
    obj("plate", 0.60, 0.16, (0.20, 0.20, 0.02), flags=("surface",)),
])
scenario(
    "put_on_plate", "put the banana on the plate", banana_plate,
    [
        answer("REACH(banana)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.16, 0.04, 0.04)), angle=0.0),
        answer("CARRY(banana) to (plate)"),
        gen(height=0.10, angle=0.2),
        answer("RELEASE(banana)"),
        gen(),
        answer("DONE"),
    ],
)

banana_plate_obstacle = scene([
    obj("banana", 0.38, -0.18, (0.16, 0.04, 0.04), yaw=0.2),
    obj("plate", 0.60, 0.16, (0.20, 0.20, 0.02), flags=("surface",)),
    obj("mug", 0.50, 0.02, (0.07, 0.07, 0.14), flags=("obstacle",)),
])
PLATE_AVOID = ("CARRY(banana) to (plate), Potential collision with mug, "
               "avoid by lifting upward and shifting left.")
_plate_lift = dict(
    z=[0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.9, 0.3, 0.0, 0.0, 0.0],
    y=[-0.5, -0.5, -0.5, -0.5, -0.5, -0.5, 0.0, 0.0, 0.0, 0.0, 0.0],
    height=0.10, angle=0.2,
)
scenario(
    "put_on_plate_obstacle", "put the banana on the plate", banana_plate_obstacle,
    [
        answer("REACH(banana)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.16, 0.04, 0.04)), angle=0.0),
        answer(PLATE_AVOID),
        gen(**_plate_lift),
        answer("RELEASE(banana)"),
        gen(),
        answer("DONE"),
    ],
)
scenario(
    "put_on_plate_obstacle_zero", "put the banana on the plate", banana_plate_obstacle,
    [
        answer("REACH(banana)"),
        gen(grip=GRIP_LATE, height=grasp_height((0.16, 0.04, 0.04)), angle=0.0),
        answer(PLATE_AVOID),
        gen(height=0.10, angle=0.2),
        answer("RELEASE(banana)"),
        gen(),
        answer("DONE"),
    ],
)


def write_all():
    SCENES.mkdir(parents=True, exist_ok=True)
    FIXTURES.mkdir(parents=True, exist_ok=True)
    index = {}
    for name, spec in SCENARIOS.items():
        (SCENES / f"{name}.json").write_text(
            json.dumps(spec["scene"], indent=2, sort_keys=True))
        (FIXTURES / f"{name}.json").write_text(
            json.dumps(spec["fixture"], indent=2))
        index[name] = {"task": spec["task"], "scene": f"scenes/{name}.json",
                       "fixture": f"fixtures/{name}.json", "judge": spec["judge"]}
    (HERE / "index.json").write_text(json.dumps(index, indent=2, sort_keys=True))
    print(f"wrote {len(SCENARIOS)} scenarios")


if __name__ == "__main__":
    write_all()

from pathlib import Path

import numpy as np

from deskprim.perception import DetectedObject, NoiseConfig, object_list_text, perceive
from deskprim.sim import TabletopSim


GOLDEN = Path(__file__).parent / "golden"


def detection(label, pos, yaw, extents):
    return DetectedObject(label=label, position=np.asarray(pos, float), yaw=yaw,
                          extents=np.asarray(extents, float))


class TestPerceive:
    def test_noise_off_is_identity(self, fruit_scene):
        sim = TabletopSim(fruit_scene)
        dets = perceive(sim.state)
        by_label = {d.label: d for d in dets}
        for obj in fruit_scene.objects:
            assert np.array_equal(by_label[obj.label].position, obj.position)
            assert by_label[obj.label].yaw == obj.yaw

    def test_seeded_noise_reproducible_and_bounded(self, fruit_scene):
        sim = TabletopSim(fruit_scene)
        noise = NoiseConfig(enabled=True, position_bound_m=0.005, seed=42)
        a = perceive(sim.state, noise)
        b = perceive(sim.state, noise)
        for da, db in zip(a, b):
            assert np.array_equal(da.position, db.position)
        truth = {o.label: o.position for o in fruit_scene.objects}
        for d in a:
            offs = np.abs(d.position - truth[d.label])
            assert np.all(offs <= 0.005)
            assert np.any(offs > 0)

    def test_held_object_excluded(self, fruit_scene):
        sim = TabletopSim(fruit_scene)
        sim.state.held = "banana"
        labels = [d.label for d in perceive(sim.state)]
        assert labels == ["pear"]


class TestObjectListText:
    def test_empty(self):
        assert object_list_text([]) == (GOLDEN / "objlist_empty.txt").read_text()

    def test_one_object(self):
        dets = [detection("sponge", (0.40, -0.10, 0.02), 0.30, (0.12, 0.08, 0.02))]
        assert object_list_text(dets) == (GOLDEN / "objlist_one.txt").read_text()

    def test_two_objects_label_ordered(self):
        dets = [
            detection("sponge", (0.40, -0.10, 0.02), 0.30, (0.12, 0.08, 0.02)),
            detection("plate", (0.55, 0.20, 0.01), 0.0, (0.20, 0.20, 0.02)),
        ]
        assert object_list_text(dets) == (GOLDEN / "objlist_two.txt").read_text()

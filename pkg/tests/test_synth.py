import numpy as np
import pytest

from spacefp.errors import InvalidConfig
from spacefp.synth import (
    PerturbationConfig,
    PresencePattern,
    SynthConfig,
    VirtualSpace,
    derive_seed,
    generate_instances,
    generate_spaces,
    perturb_instance,
    render_detections,
)

SMALL = SynthConfig(ns=3, ni=4, fd=48, fr=4, ng_range=(1, 5), np_range=(2, 6), seed=11)


def records(dt):
    return sorted((r.device_id, r.timestamp) for r in dt)


def big_space(n_patterns=100, tau=200, fd=1000, ng=10):
    pats = tuple(PresencePattern(tuple(f"p{j}.d{k}" for k in range(ng)), 100, tau)
                 for j in range(n_patterns))
    return VirtualSpace(pats, fd, "v", ng_range=(1, 10))


class TestGeneration:
    def test_deterministic(self):
        a = [(i.instance_id, records(i.detections)) for i in generate_instances(
            generate_spaces(SMALL), 4, PerturbationConfig(alpha_ts=0.2, rho=0.3, seed=5))]
        b = [(i.instance_id, records(i.detections)) for i in generate_instances(
            generate_spaces(SMALL), 4, PerturbationConfig(alpha_ts=0.2, rho=0.3, seed=5))]
        assert a == b

    def test_seed_changes_output(self):
        assert generate_spaces(SMALL) != generate_spaces(SynthConfig(**{**SMALL.__dict__, "seed": 12}))

    def test_space_shape(self):
        spaces = generate_spaces(SMALL)
        assert [s.name for s in spaces] == ["s0", "s1", "s2"]
        for s in spaces:
            assert 2 <= s.np_ <= 6
            for p in s.patterns:
                assert 1 <= p.ng <= 5 and p.t_start + p.tau <= 48

    def test_instances_ids_and_counts(self):
        insts = list(generate_instances(generate_spaces(SMALL), 4, PerturbationConfig()))
        assert len(insts) == 12
        assert insts[0].instance_id == "s0-i0" and insts[-1].space == "s2"

    def test_zero_noise_instances_are_identical(self):
        insts = list(generate_instances(generate_spaces(SMALL), 4, PerturbationConfig(seed=3)))
        by_space = {}
        for inst in insts:
            by_space.setdefault(inst.space, []).append(records(inst.detections))
        for recs in by_space.values():
            assert all(r == recs[0] for r in recs)

    def test_derive_seed_stable(self):
        assert derive_seed(1, 2, 3) == derive_seed(1, 2, 3) != derive_seed(1, 2, 4)


class TestPerturb:
    def test_zero_noise_identity(self):
        vs = big_space(5)
        assert perturb_instance(vs, PerturbationConfig(seed=9)) == vs

    def test_gamma_removes_floor(self):
        vs = big_space(100)
        assert perturb_instance(vs, PerturbationConfig(gamma=0.5)).np_ == 50
        assert perturb_instance(big_space(7), PerturbationConfig(gamma=0.5)).np_ == 4

    def test_gamma_one_leaves_no_devices(self):
        out = perturb_instance(big_space(3), PerturbationConfig(gamma=1.0))
        assert len(render_detections(out, "x", PerturbationConfig())) == 0

    def test_beta_adds_patterns(self):
        out = perturb_instance(big_space(10), PerturbationConfig(beta=0.5, seed=2))
        assert out.np_ == 15
        assert all(p.group[0].startswith("v.n") for p in out.patterns[10:])

    def test_duration_jitter_statistics(self):
        # sigma = 0.1 * 200 = 20; the sample mean of 100 draws is within 3 sigma / sqrt(N)
        taus = [p.tau for p in perturb_instance(big_space(100), PerturbationConfig(alpha_td=0.1, seed=4)).patterns]
        assert abs(np.mean(taus) - 200) < 3 * 20 / np.sqrt(100)
        assert 10 < np.std(taus) < 30

    def test_jitter_is_clamped(self):
        vs = VirtualSpace((PresencePattern(("a",), 0, 10),), 10, "v")
        for seed in range(30):
            (p,) = perturb_instance(vs, PerturbationConfig(alpha_ts=2, alpha_td=2, seed=seed)).patterns
            assert 0 <= p.t_start and p.tau >= 1 and p.t_start + p.tau <= 10

    def test_group_size_jitter(self):
        out = perturb_instance(big_space(50), PerturbationConfig(alpha_gs=0.3, seed=1))
        sizes = [p.ng for p in out.patterns]
        assert min(sizes) >= 1 and len(set(sizes)) > 1
        for p in out.patterns:
            assert len(set(p.group)) == p.ng

    def test_validation(self):
        with pytest.raises(InvalidConfig):
            PerturbationConfig(rho=1.5)
        with pytest.raises(InvalidConfig):
            PerturbationConfig(alpha_ts=-0.1)
        with pytest.raises(InvalidConfig):
            SynthConfig(fd=10, fr=3)


class TestRender:
    def test_single_pattern(self):
        vs = VirtualSpace((PresencePattern(("a",), 3, 2),), 10, "v")
        assert records(render_detections(vs, "s", PerturbationConfig())) == [("a", 3), ("a", 4)]

    def test_detection_period(self):
        vs = VirtualSpace((PresencePattern(("a", "b"), 0, 7),), 10, "v", detection_period=3)
        assert records(render_detections(vs, "s", PerturbationConfig())) == \
            [("a", 0), ("a", 3), ("a", 6), ("b", 0), ("b", 3), ("b", 6)]

    def test_rho_one_is_empty(self):
        assert len(render_detections(big_space(3), "s", PerturbationConfig(rho=1.0))) == 0

    def test_rho_half_binomial(self):
        # 50 devices x 200 units = 10000 scheduled detections
        dt = render_detections(big_space(5), "s", PerturbationConfig(rho=0.5, seed=8))
        assert abs(len(dt) - 5000) <= 3 * 50

    def test_eta_async_devices(self):
        vs = VirtualSpace((PresencePattern(tuple(f"d{k}" for k in range(10)), 0, 40),), 40, "v")
        dt = render_detections(vs, "s", PerturbationConfig(eta=0.5, seed=1))
        per_device = {}
        for r in dt:
            per_device[r.device_id] = per_device.get(r.device_id, 0) + 1
        assert sorted(per_device.values()).count(40) == 5
        assert all(v <= 20 for v in per_device.values() if v != 40)

    def test_short_patterns_exempt_from_eta(self):
        vs = VirtualSpace((PresencePattern(("a", "b"), 0, 3),), 5, "v")
        assert len(render_detections(vs, "s", PerturbationConfig(eta=1.0))) == 6

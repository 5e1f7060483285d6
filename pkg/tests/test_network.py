"""Network construction, forward propagation and variant wiring."""

import numpy as np
import pytest

from mixedpinn import autodiff as ad
from mixedpinn.autodiff import Dual2, dual_tanh, line_input, spatial_inputs
from mixedpinn.network import (Mlp, NetworkError, VARIANTS, assemble_variant,
                               forward, init_params, load_params,
                               reset_second_order_count, save_params,
                               second_order_count)


class TestInit:
    def test_same_seed_bit_identical(self):
        a = init_params([2, 8, 1], seed=13)
        b = init_params([2, 8, 1], seed=13)
        for wa, wb in zip(a.weights, b.weights):
            assert np.array_equal(wa, wb)

    def test_biases_exactly_zero(self):
        net = init_params([2, 16, 16, 1], seed=0)
        for b in net.biases:
            assert np.all(b == 0.0)

    def test_weight_sample_mean_is_small(self):
        # 10^4 draws from U(-a, a): sd of the mean is a/(sqrt(3) sqrt(n))
        net = init_params([100, 100, 1], seed=3)
        w = net.weights[0]
        limit = np.sqrt(6.0 / 200)
        sigma = limit / np.sqrt(3.0)
        assert abs(w.mean()) < 3.0 * sigma / 100.0

    def test_fan_scaled_range(self):
        net = init_params([2, 40, 1], seed=1)
        limit = np.sqrt(6.0 / 42)
        assert np.max(np.abs(net.weights[0])) <= limit

    def test_param_count(self):
        net = init_params([2, 40, 40, 1], seed=0)
        assert net.n_params == 40 * 2 + 40 + 40 * 40 + 40 + 40 + 1

    def test_empty_layer_list_rejected(self):
        with pytest.raises(NetworkError):
            init_params([3], seed=0)
        with pytest.raises(NetworkError):
            init_params([2, 0, 1], seed=0)


class TestForward:
    def test_zero_parameters_zero_outputs(self):
        net = init_params([2, 5, 1], seed=0)
        net = Mlp(net.layer_sizes, [w * 0.0 for w in net.weights],
                  [b * 0.0 for b in net.biases])
        x, y = spatial_inputs([0.3, 0.7], [0.1, 0.9])
        out = forward(net, (x, y))[0]
        assert np.all(ad.value_of(out.value) == 0.0)
        assert np.all(ad.value_of(out.d_x) == 0.0)

    def test_single_neuron_hand_chain_rule(self):
        # one hidden tanh neuron: w1=1, b1=0, w2=2, b2=0.5 at x=0
        net = Mlp([1, 1, 1], [np.array([[1.0]]), np.array([[2.0]])],
                  [np.array([[0.0]]), np.array([[0.5]])])
        out = forward(net, (line_input([0.0]),))[0]
        assert np.ravel(ad.value_of(out.value))[0] == pytest.approx(0.5)
        assert np.ravel(ad.value_of(out.d_x))[0] == pytest.approx(2.0)

    def test_dx_matches_finite_difference(self):
        net = init_params([2, 8, 8, 1], seed=5)
        xs = np.array([0.3, 0.6])
        ys = np.array([0.2, 0.8])
        out = forward(net, spatial_inputs(xs, ys))[0]
        h = 1e-6
        up = forward(net, spatial_inputs(xs + h, ys))[0]
        dn = forward(net, spatial_inputs(xs - h, ys))[0]
        fd = (ad.value_of(up.value) - ad.value_of(dn.value)) / (2 * h)
        got = ad.value_of(out.d_x)
        assert np.allclose(got, fd, rtol=1e-6, atol=1e-10)

    def test_blocked_path_agrees_with_manual_dual_chain(self):
        net = init_params([2, 6, 6, 1], seed=11)
        xs, ys = np.array([0.25, 0.5, 0.75]), np.array([0.4, 0.1, 0.9])
        out = forward(net, spatial_inputs(xs, ys))[0]

        # independent propagation with scalar Dual2 arithmetic per point
        for i, (xv, yv) in enumerate(zip(xs, ys)):
            h = [Dual2(float(xv), 1.0, 0.0), Dual2(float(yv), 0.0, 1.0)]
            for l, (w, b) in enumerate(zip(net.weights, net.biases)):
                nxt = []
                for r in range(w.shape[0]):
                    acc = Dual2(float(b[r, 0]))
                    for c in range(w.shape[1]):
                        acc = acc + h[c] * float(w[r, c])
                    nxt.append(acc if l == len(net.weights) - 1
                               else dual_tanh(acc))
                h = nxt
            assert np.ravel(ad.value_of(out.value))[i] == pytest.approx(
                h[0].value, rel=1e-13)
            assert np.ravel(ad.value_of(out.d_x))[i] == pytest.approx(
                h[0].d_x, rel=1e-12, abs=1e-14)

    def test_second_order_matches_fd(self):
        # forward-over-forward d_xx against second-order central differences
        net = init_params([2, 10, 10, 1], seed=21)
        xs, ys = np.array([0.4, 0.7]), np.array([0.3, 0.6])
        out = forward(net, spatial_inputs(xs, ys, second_order=True))[0]
        h = 1e-3

        def val(dx):
            o = forward(net, spatial_inputs(xs + dx, ys))[0]
            return np.ravel(ad.value_of(o.value))

        fd = (val(h) - 2 * val(0.0) + val(-h)) / (h * h)
        got = np.ravel(ad.value_of(out.d_xx))
        assert np.allclose(got, fd, rtol=1e-3, atol=1e-8)

        def val_xy(dx, dy):
            o = forward(net, spatial_inputs(xs + dx, ys + dy))[0]
            return np.ravel(ad.value_of(o.value))

        fd_xy = (val_xy(h, h) - val_xy(h, -h) - val_xy(-h, h)
                 + val_xy(-h, -h)) / (4 * h * h)
        assert np.allclose(np.ravel(ad.value_of(out.d_xy)), fd_xy,
                           rtol=1e-3, atol=1e-8)

    def test_linear_output_layer_scaling(self):
        net = init_params([2, 6, 1], seed=2)
        scaled = Mlp(net.layer_sizes,
                     [net.weights[0], 4.0 * net.weights[1]],
                     [net.biases[0], 4.0 * net.biases[1]])
        x, y = spatial_inputs([0.2, 0.9], [0.5, 0.3])
        base = ad.value_of(forward(net, (x, y))[0].value)
        big = ad.value_of(forward(scaled, (x, y))[0].value)
        assert np.array_equal(big, 4.0 * base)

    def test_input_count_mismatch(self):
        net = init_params([2, 4, 1], seed=0)
        with pytest.raises(NetworkError):
            forward(net, (line_input([0.0]),))


class TestVariants:
    def test_variant_e_elastic(self):
        heads = assemble_variant("E", "elastic")
        assert sorted(heads.nets) == ["sig_x", "sig_xy", "sig_y", "u_x", "u_y"]
        assert heads.variant.terms == ("EF", "DBC", "cnc", "SF", "NBC")
        assert not heads.variant.second_order

    def test_variant_b_elastic(self):
        heads = assemble_variant("B", "elastic")
        assert sorted(heads.nets) == ["u_x", "u_y"]
        assert heads.variant.terms == ("EF", "DBC")
        assert heads.variant.neumann_via_energy

    def test_variant_a_thermal(self):
        heads = assemble_variant("A", "thermal")
        assert list(heads.nets) == ["T"]
        assert heads.variant.second_order
        assert heads.variant.sf_source == "primary"

    def test_variant_e_thermal_three_nets(self):
        heads = assemble_variant("E", "thermal")
        assert sorted(heads.nets) == ["T", "q_x", "q_y"]

    def test_variant_c_combined_single_net(self):
        heads = assemble_variant("C", "elastic")
        assert list(heads.nets) == ["combined"]
        assert heads.nets["combined"].n_outputs == 5
        assert heads.output_of["sig_xy"] == ("combined", 4)

    def test_variant_d_terms(self):
        spec = VARIANTS["D"]
        assert "EF" not in spec.terms
        assert spec.second_order and spec.sf_source == "primary"
        assert spec.nbc_source == "heads"

    def test_unknown_tag_rejected(self):
        with pytest.raises(NetworkError):
            assemble_variant("Z", "elastic")

    def test_default_architecture(self):
        heads = assemble_variant("E", "elastic")
        assert heads.nets["u_x"].layer_sizes == [2, 40, 40, 40, 40, 40, 1]

    def test_heads_have_disjoint_parameters(self):
        heads = assemble_variant("E", "thermal", hidden_layers=2, neurons=5,
                                 seed=3)
        x, y = spatial_inputs([0.3, 0.8], [0.2, 0.4])
        base = {n: ad.value_of(d.value).copy()
                for n, d in heads.evaluate(x, y).items()}
        heads.nets["T"].weights[0][0, 0] += 0.5
        after = heads.evaluate(x, y)
        assert not np.array_equal(ad.value_of(after["T"].value), base["T"])
        for name in ("q_x", "q_y"):
            assert np.array_equal(ad.value_of(after[name].value), base[name])

    def test_second_order_instrumentation(self):
        x, y = spatial_inputs([0.3], [0.2], second_order=True)
        x1, y1 = spatial_inputs([0.3], [0.2])
        for tag, expect_second in (("A", True), ("B", False), ("C", False),
                                   ("D", True), ("E", False)):
            heads = assemble_variant(tag, "elastic", hidden_layers=1,
                                     neurons=3)
            reset_second_order_count()
            if expect_second:
                heads.evaluate(x, y)
                assert second_order_count() > 0
            else:
                heads.evaluate(x1, y1)
                assert second_order_count() == 0


class TestSerialization:
    def test_round_trip(self, tmp_path):
        heads = assemble_variant("E", "thermal", hidden_layers=2, neurons=4,
                                 seed=9)
        path = tmp_path / "params.txt"
        save_params(heads.nets, path)
        loaded = load_params(path)
        assert sorted(loaded) == sorted(heads.nets)
        for name, net in heads.nets.items():
            assert loaded[name].layer_sizes == net.layer_sizes
            for a, b in zip(loaded[name].weights, net.weights):
                assert np.array_equal(a, b)
            for a, b in zip(loaded[name].biases, net.biases):
                assert np.array_equal(a, b)

    def test_rejects_garbage(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("not a snapshot\n")
        with pytest.raises(NetworkError):
            load_params(path)

"""
Network Tests
=============

Tests for the extraction networks including:
- Parameter registry, initialization and reference model sizes
- Layer norms
- TI and TV fusion, including their equivalence on constant embeddings
- Forward shapes and end-to-end gradients
- Causality of causal models with and without intra-chunk lookahead
"""

import numpy as np
import pytest

from src.autodiff import Tape, Tensor, grad_check, ops
from src.dsp import frame
from src.errors import FusionShapeError, ShapeMismatchError
from src.metrics import sdr_loss
from src.networks import (
    REFERENCE_SIZES,
    DprnnConfig,
    ExtractionModel,
    ModelConfig,
    ModelParams,
    algorithmic_lookahead,
    average_embeddings,
    aux_forward,
    build_registry,
    clnorm,
    decoder_forward,
    desk_model_config,
    dprnn_stack_forward,
    encoder_forward,
    extract_forward,
    fuse,
    glnorm,
    param_breakdown,
    param_count,
    receptive_field,
    reference_configs,
    stack_forward,
    tcn_stack_forward,
)


class TestRegistry:
    """Test parameter declaration and initialization."""

    @pytest.mark.parametrize("name", sorted(REFERENCE_SIZES))
    def test_reference_sizes(self, name):
        """Full-scale models are within 20% of the reference sizes."""
        count = param_count(reference_configs()[name])
        assert abs(count - REFERENCE_SIZES[name]) <= 0.2 * REFERENCE_SIZES[name]

    def test_causal_dprnn_is_smaller(self):
        """A one-way inter-chunk LSTM shrinks the model."""
        configs = reference_configs()
        assert param_count(configs["causal DPRNN"]) < param_count(configs["DPRNN"])

    def test_initialized_size_matches_count(self, tiny_dprnn_config):
        """Allocated tensors add up to param_count."""
        params = ModelParams.initialize(tiny_dprnn_config)
        assert params.total() == param_count(tiny_dprnn_config)
        assert sum(param_breakdown(tiny_dprnn_config).values()) == params.total()

    def test_three_full_stacks(self, tiny_tcn_config):
        """Aux, ext1 and ext2 each carry their own blocks."""
        names = build_registry(tiny_tcn_config)
        for stack in ("aux", "ext1", "ext2"):
            assert f"{stack}.blocks.0.conv_in.weight" in names
            assert f"{stack}.blocks.1.depthwise.weight" in names

    def test_initial_values(self, tiny_tcn_config):
        """Norm gains start at 1, PReLU slopes at 0.25, weights within 1/sqrt(fan_in)."""
        params = ModelParams.initialize(tiny_tcn_config, seed=3)
        np.testing.assert_array_equal(params["aux.input_norm.gain"].data, 1.0)
        np.testing.assert_array_equal(params["aux.output_prelu.slope"].data, 0.25)
        weight = params["ext1.bottleneck.weight"].data
        assert np.max(np.abs(weight)) <= 1.0 / np.sqrt(tiny_tcn_config.encoder.channels)

    def test_seeded_initialization(self, tiny_tcn_config):
        """Same seed gives the same parameters."""
        a = ModelParams.initialize(tiny_tcn_config, seed=1).arrays()
        b = ModelParams.initialize(tiny_tcn_config, seed=1).arrays()
        assert all(np.array_equal(a[k], b[k]) for k in a)

    def test_from_arrays_requires_every_tensor(self, tiny_tcn_config):
        """Missing tensors are reported."""
        arrays = ModelParams.initialize(tiny_tcn_config).arrays()
        arrays.pop("decoder.weight")
        with pytest.raises(ValueError, match="decoder.weight"):
            ModelParams.from_arrays(tiny_tcn_config, arrays)

    def test_load_arrays_shape_check(self, tiny_tcn_config):
        """Loading a wrongly shaped array fails."""
        params = ModelParams.initialize(tiny_tcn_config)
        arrays = params.arrays()
        arrays["decoder.weight"] = np.zeros((1, 1, 1))
        with pytest.raises(ShapeMismatchError):
            params.load_arrays(arrays)

    def test_receptive_field(self, tiny_tcn_config):
        """Kernel 3, dilations 1 and 2: 1 + 2 * (1 + 2) frames."""
        assert receptive_field(tiny_tcn_config) == 7

    def test_desk_preset_is_small(self):
        """The desk model is smaller than the full-scale DPRNN."""
        assert param_count(desk_model_config()) < param_count(reference_configs()["DPRNN"])


class TestNorms:
    """Test global and cumulative layer norms."""

    def test_global_norm_statistics(self, rng):
        """gLN output has zero mean and unit variance overall."""
        x = Tensor(rng.normal(3.0, 2.0, size=(4, 20)))
        y = glnorm(x, Tensor(np.ones(4)), Tensor(np.zeros(4))).data
        assert abs(y.mean()) < 1e-10
        assert y.var() == pytest.approx(1.0, rel=1e-6)

    def test_cumulative_norm_is_causal(self, rng):
        """cLN frame t ignores frames after t."""
        x = rng.normal(size=(3, 10))
        gain, bias = Tensor(np.ones(3)), Tensor(np.zeros(3))
        base = clnorm(Tensor(x), gain, bias).data
        x[:, 6:] += 5.0
        moved = clnorm(Tensor(x), gain, bias).data
        np.testing.assert_allclose(moved[:, :6], base[:, :6], atol=1e-12)
        assert not np.allclose(moved[:, 6:], base[:, 6:])

    @pytest.mark.parametrize("norm", [glnorm, clnorm])
    def test_norm_gradients(self, rng, norm):
        """Both norms pass finite-difference checks."""
        x = Tensor(rng.normal(size=(3, 6)), requires_grad=True)
        gain = Tensor(rng.uniform(0.5, 1.5, size=3), requires_grad=True)
        bias = Tensor(rng.normal(size=3), requires_grad=True)
        w = rng.normal(size=(3, 6))
        assert grad_check(lambda t: ops.sum(norm(t, gain, bias) * w), x) < 1e-4
        assert grad_check(lambda t: ops.sum(norm(x, t, bias) * w), gain) < 1e-4

    def test_affine_shape_check(self):
        """Gain must have one entry per channel."""
        with pytest.raises(ShapeMismatchError):
            glnorm(Tensor(np.ones((3, 4))), Tensor(np.ones(2)), Tensor(np.zeros(2)))


class TestCodecAndStacks:
    """Test the encoders, decoder and stack entry points."""

    def test_encoder_latent(self, tiny_tcn_config, rng):
        """Encoded frames are non-negative with N channels per frame."""
        params = ModelParams.initialize(tiny_tcn_config)
        frames = frame(rng.normal(size=41), 8, 4)
        latent = encoder_forward(frames, params, "encoder_aux")
        assert latent.shape == (6, frames.num_frames)
        assert np.all(latent.data >= 0.0)

    def test_encoder_frame_length_check(self, tiny_tcn_config):
        """Frames must match the filter length."""
        params = ModelParams.initialize(tiny_tcn_config)
        with pytest.raises(ShapeMismatchError):
            encoder_forward(np.zeros((5, 3)), params)

    def test_decoder_trims_to_source(self, tiny_tcn_config, rng):
        """Ten latent frames give 44 samples, trimmed to the request."""
        params = ModelParams.initialize(tiny_tcn_config)
        latent = Tensor(rng.random(size=(6, 10)))
        assert decoder_forward(latent, params, 41, stride=4).shape == (41,)
        with pytest.raises(ShapeMismatchError):
            decoder_forward(latent, params, 45, stride=4)

    def test_aux_embeddings(self, tiny_tcn_config, rng):
        """The aux stack maps the reference latent to (N_emb x T)."""
        params = ModelParams.initialize(tiny_tcn_config)
        latent = Tensor(rng.random(size=(6, 12)))
        embeddings = aux_forward(latent, params, tiny_tcn_config)
        assert embeddings.shape == (tiny_tcn_config.embedding_channels, 12)
        np.testing.assert_array_equal(embeddings.data, stack_forward(latent, params, "aux", tiny_tcn_config).data)

    def test_architecture_specific_entry_points(self, tiny_tcn_config, tiny_dprnn_config, rng):
        """Each entry point accepts only its own architecture."""
        latent = Tensor(rng.random(size=(6, 12)))
        tcn_params = ModelParams.initialize(tiny_tcn_config)
        assert tcn_stack_forward(latent, tcn_params, tiny_tcn_config).shape == (6, 12)
        with pytest.raises(ValueError):
            dprnn_stack_forward(latent, tcn_params, tiny_tcn_config)
        dprnn_params = ModelParams.initialize(tiny_dprnn_config)
        assert dprnn_stack_forward(latent, dprnn_params, tiny_dprnn_config).shape == (6, 12)
        with pytest.raises(ValueError):
            tcn_stack_forward(latent, dprnn_params, tiny_dprnn_config)

    def test_stack_input_width_check(self, tiny_tcn_config):
        """Stacks reject inputs with the wrong channel count."""
        params = ModelParams.initialize(tiny_tcn_config)
        with pytest.raises(ShapeMismatchError):
            stack_forward(Tensor(np.ones((5, 12))), params, "ext1", tiny_tcn_config)


class TestFusion:
    """Test TI and TV embedding fusion."""

    def test_ti_broadcasts_over_frames(self, rng):
        """TI multiplies every frame by the same vector."""
        latent = Tensor(rng.normal(size=(4, 5)))
        v = rng.normal(size=4)
        np.testing.assert_allclose(fuse(latent, Tensor(v), "TI").data, latent.data * v[:, None])

    def test_tv_is_framewise(self, rng):
        """TV multiplies entrywise."""
        latent, emb = rng.normal(size=(4, 5)), rng.normal(size=(4, 5))
        np.testing.assert_allclose(fuse(Tensor(latent), Tensor(emb), "TV").data, latent * emb)

    def test_tv_pads_short_embeddings(self, rng):
        """Missing embedding frames are zero."""
        out = fuse(Tensor(np.ones((4, 6))), Tensor(np.ones((4, 4))), "TV").data
        np.testing.assert_array_equal(out[:, 4:], 0.0)
        np.testing.assert_array_equal(out[:, :4], 1.0)

    def test_tv_truncates_long_embeddings(self):
        """Extra embedding frames are dropped."""
        assert fuse(Tensor(np.ones((4, 3))), Tensor(np.ones((4, 5))), "TV").shape == (4, 3)

    @pytest.mark.parametrize(
        "mode,shape", [("TI", (5,)), ("TI", (4, 6)), ("TV", (5, 6)), ("TV", (4,))]
    )
    def test_shape_errors(self, mode, shape):
        """Embeddings with the wrong channel count are rejected."""
        with pytest.raises(FusionShapeError):
            fuse(Tensor(np.ones((4, 6))), Tensor(np.ones(shape)), mode)

    def test_average_embeddings(self, rng):
        """TI uses the mean over frames."""
        e = rng.normal(size=(4, 7))
        np.testing.assert_allclose(average_embeddings(Tensor(e)).data, e.mean(axis=1))

    def test_average_of_constant_rows_is_exact(self):
        """Rows of one repeated value average to exactly that value."""
        values = np.array([0.1, -1.7, 3.3e-5])
        e = np.tile(values[:, None], (1, 3))
        np.testing.assert_array_equal(average_embeddings(Tensor(e)).data, values)

    def test_average_gradient(self, rng):
        """Every frame receives 1/T of the upstream gradient."""
        e = Tensor(rng.normal(size=(4, 5)), requires_grad=True)
        w = rng.normal(size=4)
        assert grad_check(lambda t: ops.sum(average_embeddings(t) * w), e) < 1e-4

    @pytest.mark.parametrize("fixture", ["tiny_tcn_config", "tiny_dprnn_config"])
    def test_constant_embeddings_make_ti_equal_tv(self, request, rng, fixture):
        """With identical embedding columns, TI and TV masks are bit-identical."""
        config = request.getfixturevalue(fixture)
        params = ModelParams.initialize(config, seed=5)
        n = config.encoder.channels
        latent = Tensor(np.abs(rng.normal(size=(n, 15))))
        column = rng.normal(size=n)
        embeddings = Tensor(np.tile(column[:, None], (1, 15)))
        ti_mask, _ = extract_forward(latent, embeddings, params, config, mode="TI")
        tv_mask, _ = extract_forward(latent, embeddings, params, config, mode="TV")
        np.testing.assert_array_equal(ti_mask.data, tv_mask.data)


class TestExtractionModel:
    """Test forward passes and gradients of the full model."""

    @pytest.mark.parametrize("fixture", ["tiny_tcn_config", "tiny_dprnn_config"])
    def test_forward_shapes(self, request, rng, fixture):
        """Estimate keeps the mixture length; embeddings are (N x T)."""
        config = request.getfixturevalue(fixture)
        model = ExtractionModel(config)
        out = model.forward(rng.normal(size=203), rng.normal(size=203))
        frames = (204 - 8) // 4 + 1
        assert out.estimate.shape == (203,)
        assert out.embeddings.shape == (config.encoder.channels, frames)
        assert out.mask.shape == (config.encoder.channels, frames)
        assert np.all(out.mask.data >= 0.0)

    def test_estimate_echo_returns_float64(self, rng):
        """Inference in float32 returns float64 samples."""
        estimate = ExtractionModel(desk_model_config()).estimate_echo(rng.normal(size=400), rng.normal(size=400))
        assert estimate.dtype == np.float64
        assert estimate.shape == (400,)

    @pytest.mark.parametrize("fixture", ["tiny_tcn_config", "tiny_dprnn_config"])
    def test_end_to_end_gradients(self, request, rng, fixture):
        """Loss gradients of sampled parameters match finite differences."""
        config = request.getfixturevalue(fixture)
        model = ExtractionModel(config, seed=2)
        mixture, reference, echo = rng.normal(size=(3, 64))

        def loss(_):
            return sdr_loss(echo, model.forward(mixture + echo, reference).estimate)

        for name in ("encoder_aux.weight", "aux.bottleneck.weight", "ext1.input_norm.gain", "ext2.mask_proj.weight", "decoder.weight"):
            assert grad_check(loss, model.params[name], max_entries=6) < 1e-3, name

    def test_every_parameter_receives_gradient(self, tiny_dprnn_config, rng):
        """Backward reaches every registered tensor."""
        model = ExtractionModel(tiny_dprnn_config, seed=1)
        mixture, reference = rng.normal(size=(2, 96))
        with Tape() as tape:
            loss = sdr_loss(mixture, model.forward(mixture, reference).estimate)
            grads = tape.backward(loss, accumulate=False)
        for name, tensor in model.params.items():
            assert tensor in grads, name
            assert grads[tensor].shape == tensor.shape


class TestCausality:
    """Test that causal models ignore input beyond their lookahead."""

    @staticmethod
    def _probe(config: ModelConfig, rng) -> tuple[np.ndarray, np.ndarray, int]:
        model = ExtractionModel(config, seed=4)
        mixture, reference = rng.normal(size=(2, 400))
        base = model.estimate_echo(mixture, reference)
        at = 300
        mixture[at] += 3.0
        reference[at] += 3.0
        return base, model.estimate_echo(mixture, reference), at

    def test_causal_tcn(self, tiny_tcn_config, rng):
        """Causal TCN outputs before sample m - L are unchanged by sample m."""
        config = tiny_tcn_config.model_copy(update={"causal": True})
        lookahead = algorithmic_lookahead(config)
        assert lookahead == 8
        base, moved, at = self._probe(config, rng)
        np.testing.assert_allclose(moved[: at - lookahead + 1], base[: at - lookahead + 1], atol=1e-10)
        assert not np.allclose(moved[at:], base[at:])

    def test_strictly_causal_dprnn(self, tiny_dprnn_config, rng):
        """With a one-way intra-chunk LSTM the lookahead is one encoder window."""
        config = tiny_dprnn_config.model_copy(
            update={"causal": True, "dprnn": DprnnConfig(bottleneck=4, chunk=4, hidden=3, blocks_per_stack=1, intra_bidirectional=False)}
        )
        lookahead = algorithmic_lookahead(config)
        assert lookahead == 8
        base, moved, at = self._probe(config, rng)
        np.testing.assert_allclose(moved[: at - lookahead + 1], base[: at - lookahead + 1], atol=1e-10)

    def test_causal_dprnn_with_chunk_lookahead(self, tiny_dprnn_config, rng):
        """A bidirectional intra-chunk LSTM looks (K-1) frames ahead."""
        config = tiny_dprnn_config.model_copy(update={"causal": True})
        lookahead = algorithmic_lookahead(config)
        assert lookahead == 3 * 4 + 8
        base, moved, at = self._probe(config, rng)
        np.testing.assert_allclose(moved[: at - lookahead + 1], base[: at - lookahead + 1], atol=1e-10)

    def test_non_causal_model_sees_the_future(self, tiny_dprnn_config, rng):
        """Global norms spread a late change to early outputs."""
        assert algorithmic_lookahead(tiny_dprnn_config) is None
        base, moved, _ = self._probe(tiny_dprnn_config, rng)
        assert not np.allclose(moved[:100], base[:100])

import numpy as np
import pytest

from oracle_nets import cbam_loops, conv2d_loops, pooled_loops, resblock_loops

from facelight.errors import DomainError
from facelight.features import (
    FeatureParams,
    cbam_forward,
    conv2d_same,
    extract_features,
    feature_length,
    pooled_features,
    resblock_forward,
)


def zero_params(seed=0):
    z33 = np.zeros((3, 3, 3, 3))
    return FeatureParams(
        conv1=z33, conv2=z33, conv3=z33,
        scale1=np.ones(3), shift1=np.zeros(3),
        scale2=np.ones(3), shift2=np.zeros(3),
        scale3=np.ones(3), shift3=np.zeros(3),
        mlp_w1=np.zeros((3, 3)), mlp_b1=np.zeros(3),
        mlp_w2=np.zeros((3, 3)), mlp_b2=np.zeros(3),
        spatial=np.zeros((1, 2, 7, 7)),
        seed=seed,
    )


def test_params_reproducible_from_seed():
    a = FeatureParams.from_seed(42)
    b = FeatureParams.from_seed(42)
    assert np.array_equal(a.conv1, b.conv1)
    assert np.array_equal(a.spatial, b.spatial)
    c = FeatureParams.from_seed(43)
    assert not np.array_equal(a.conv1, c.conv1)


def test_params_shape_validation():
    with pytest.raises(DomainError):
        FeatureParams.from_dict({**FeatureParams.from_seed(0).to_dict(), "conv1": [[0.0]]})


def test_conv_matches_loop_oracle():
    rng = np.random.default_rng(42)
    x = rng.normal(size=(3, 6, 5))
    k = rng.normal(size=(4, 3, 3, 3))
    fast = conv2d_same(x[None], k)[0]
    slow = conv2d_loops(x, k)
    assert np.allclose(fast, slow, rtol=1e-6, atol=1e-12)


def test_resblock_zero_everything():
    x = np.zeros((3, 4, 4))
    assert np.array_equal(resblock_forward(x, zero_params()), x)


def test_resblock_zero_main_path_is_relu_shortcut():
    rng = np.random.default_rng(5)
    x = rng.normal(size=(3, 5, 5))
    out = resblock_forward(x, zero_params())
    assert np.array_equal(out, np.maximum(x, 0.0))


def test_resblock_matches_loop_oracle():
    rng = np.random.default_rng(42)
    x = rng.normal(size=(3, 6, 6))
    params = FeatureParams.from_seed(42)
    fast = resblock_forward(x, params)
    slow = resblock_loops(x, params)
    assert np.allclose(fast, slow, rtol=1e-6, atol=1e-12)


def test_resblock_channel_mismatch():
    with pytest.raises(DomainError):
        resblock_forward(np.zeros((2, 4, 4)), zero_params())


def test_resblock_preserves_shape():
    x = np.random.default_rng(1).normal(size=(3, 9, 7))
    assert resblock_forward(x, FeatureParams.from_seed(1)).shape == x.shape


def test_cbam_zero_input_zero_output():
    out = cbam_forward(np.zeros((3, 4, 4)), FeatureParams.from_seed(3))
    assert np.array_equal(out, np.zeros((3, 4, 4)))


def test_cbam_attenuates_elementwise():
    rng = np.random.default_rng(9)
    for trial in range(10):
        x = rng.normal(size=(3, 5, 5)) * rng.uniform(0.1, 10)
        params = FeatureParams.from_seed(trial)
        out = cbam_forward(x, params)
        assert np.all(np.abs(out) <= np.abs(x) + 1e-15)


def test_cbam_matches_loop_oracle():
    rng = np.random.default_rng(7)
    x = rng.normal(size=(3, 6, 6))
    params = FeatureParams.from_seed(7)
    fast = cbam_forward(x, params)
    slow = cbam_loops(x, params)
    assert np.allclose(fast, slow, rtol=1e-6, atol=1e-12)


def test_cbam_preserves_shape():
    x = np.random.default_rng(2).normal(size=(3, 8, 6))
    assert cbam_forward(x, FeatureParams.from_seed(2)).shape == x.shape


def test_pooled_constant_tensor():
    s = np.full((3, 8, 8), 2.5)
    vec = pooled_features(s, 2)
    per = 2 + 4
    for c in range(3):
        assert vec[c * per] == pytest.approx(2.5)       # mean
        assert vec[c * per + 1] == pytest.approx(0.0)   # std
        assert np.allclose(vec[c * per + 2 : (c + 1) * per], 2.5)


def test_pooled_p1_length():
    assert pooled_features(np.zeros((3, 4, 4)), 1).shape == (9,)
    assert feature_length(1) == 9


def test_pooled_matches_loop_oracle():
    rng = np.random.default_rng(21)
    s = rng.normal(size=(3, 7, 9))
    assert np.array_equal(pooled_features(s, 3), pooled_loops(s, 3))


def test_pooled_grid_too_large():
    with pytest.raises(DomainError):
        pooled_features(np.zeros((3, 4, 4)), 5)


def test_forward_passes_deterministic():
    rng = np.random.default_rng(8)
    x = rng.normal(size=(3, 6, 6))
    params = FeatureParams.from_seed(8)
    a = cbam_forward(resblock_forward(x, params), params)
    b = cbam_forward(resblock_forward(x, params), params)
    assert np.array_equal(a, b)


def test_extract_features_batch_matches_single():
    rng = np.random.default_rng(10)
    imgs = rng.integers(0, 256, size=(4, 10, 10, 3), dtype=np.uint8)
    params = FeatureParams.from_seed(10)
    batch = extract_features(imgs, params, 12, 2)
    singles = np.stack([extract_features(im, params, 12, 2) for im in imgs])
    assert np.allclose(batch, singles, rtol=1e-12, atol=1e-15)
    assert batch.shape == (4, feature_length(2))

#include <doctest.h>

#include <cmath>
#include <utility>

#include "generators.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "sdec/autoencoder.hpp"

using namespace sdec;

namespace {

AutoencoderParams identity_pair() {
  AutoencoderParams p;
  p.encoder.push_back({Matrix{{1, 0}, {0, 1}}, {0, 0}});
  p.decoder.push_back({Matrix{{1, 0}, {0, 1}}, {0, 0}});
  return p;
}

double grad_norm(const AutoencoderParams& g) {
  double s = 0.0;
  for (const auto& t : g.tensors())
    for (const double v : t) s += v * v;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("selu values and derivative") {
  CHECK(selu(0.0) == 0.0);
  CHECK(selu(1.0) == 1.05070098735548);
  CHECK(selu(-1.0) == doctest::Approx(kSeluLambda * kSeluAlpha * (std::exp(-1.0) - 1.0)));
  for (const double x : {1e-3, -1e-3, 0.7, -2.5}) {
    const double h = 1e-7;
    const double fd = (selu(x + h) - selu(x - h)) / (2 * h);
    CHECK(std::abs(selu_derivative(x) - fd) < 1e-6);
  }
}

TEST_CASE("init_params shapes and scale") {
  Rng rng(1);
  const std::vector<std::size_t> dims{30, 20, 10, 4};
  const auto p = init_params(dims, rng);
  REQUIRE(p.encoder.size() == 3);
  REQUIRE(p.decoder.size() == 3);
  CHECK(p.input_dim() == 30);
  CHECK(p.latent_dim() == 4);
  CHECK(p.layer_dims() == dims);
  for (std::size_t l = 0; l < 3; ++l) {
    const auto& e = p.encoder[l];
    const auto& d = p.decoder[2 - l];
    CHECK(e.weights.rows() == d.weights.cols());
    CHECK(e.weights.cols() == d.weights.rows());
    for (const double b : e.bias) CHECK(b == 0.0);
  }
  std::size_t enc = 0, dec = 0;
  for (const auto& l : p.encoder) enc += l.weights.size();
  for (const auto& l : p.decoder) dec += l.weights.size();
  CHECK(enc == dec);

  Rng big(2);
  const std::vector<std::size_t> wide{400, 300};
  const auto q = init_params(wide, big);
  double s = 0.0;
  for (const double w : q.encoder[0].weights.data()) s += w * w;
  const double var = s / static_cast<double>(q.encoder[0].weights.size());
  CHECK(var == doctest::Approx(1.0 / 400).epsilon(0.03));
}

TEST_CASE("forward: zero network gives zeros") {
  Rng rng(3);
  const std::vector<std::size_t> dims{4, 3, 2};
  auto p = init_params(dims, rng).zeros_like();
  const auto r = forward(p, gen::gaussian_matrix(rng, 5, 4));
  for (const double v : r.latent.data()) CHECK(v == 0.0);
  for (const double v : r.reconstruction.data()) CHECK(v == 0.0);
}

TEST_CASE("forward: identity pair scales positive input by lambda") {
  const auto r = forward(identity_pair(), Matrix{{0.5, 2.0}});
  CHECK(r.latent(0, 0) == doctest::Approx(kSeluLambda * 0.5));
  CHECK(r.latent(0, 1) == doctest::Approx(kSeluLambda * 2.0));
  // Linear decoder output: identity applied to the SeLU latent.
  CHECK(r.reconstruction(0, 0) == doctest::Approx(0.525350493677740));
  CHECK(r.reconstruction(0, 1) == doctest::Approx(2.10140197471096));
}

TEST_CASE("forward matches the loop oracle and is batch independent") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = gradcheck::random_autoencoder(rng);
    const auto r = forward(inst.params, inst.batch);
    const auto ref = oracle::ae_layers(inst.params, inst.batch);
    CHECK(oracle::max_abs_diff(r.reconstruction, ref.back()) < 1e-12);
    CHECK(oracle::max_abs_diff(r.latent, ref[inst.params.encoder.size()]) < 1e-12);
    CHECK(oracle::max_abs_diff(encode(inst.params, inst.batch), r.latent) < 1e-15);
    for (std::size_t i = 0; i < inst.batch.rows(); ++i) {
      const std::vector<std::size_t> one{i};
      const auto single = forward(inst.params, inst.batch.gather_rows(one));
      for (std::size_t c = 0; c < r.reconstruction.cols(); ++c) {
        CHECK(std::abs(single.reconstruction(0, c) - r.reconstruction(i, c)) < 1e-13);
      }
    }
  }
  CHECK_THROWS_AS(forward(identity_pair(), Matrix{{1, 2, 3}}), Error);
}

TEST_CASE("recon_loss worked cases") {
  const Matrix x{{1, 2}, {3, 4}};
  const auto perfect = recon_loss(x, x, 1e-8);
  CHECK(perfect.l_mse == 0.0);
  CHECK(std::abs(perfect.l_cosine) < 1e-15);
  CHECK(std::abs(perfect.l_recon) < 1e-15);

  const auto ortho = recon_loss(Matrix{{1, 0}}, Matrix{{0, 1}}, 1e-8);
  CHECK(ortho.l_mse == 1.0);
  CHECK(ortho.l_cosine == 1.0);

  // Two orthogonal rows give mean cosine loss 1; s = sqrt 5 makes l_mse = 3.
  const double s = std::sqrt(5.0);
  const auto r = recon_loss(Matrix{{1, 0}, {0, 1}}, Matrix{{0, s}, {s, 0}}, 1e-300);
  CHECK(r.l_mse == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(r.l_cosine == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(r.w_mse == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(r.w_cosine == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(r.l_recon == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("recon_loss zero-norm reconstruction row falls back to loss 1") {
  const auto r = recon_loss(Matrix{{1, 0}, {0, 1}}, Matrix{{0, 0}, {0, 1}}, 1e-8);
  CHECK(r.degenerate_rows == 1);
  CHECK(r.l_cosine == doctest::Approx(0.5));
  Matrix batch{{1, 0}, {0, 1}};
  const auto g = recon_loss_gradient(batch, Matrix{{0, 0}, {0, 1}}, 1e-8);
  CHECK(g.d_reconstruction.all_finite());
}

TEST_CASE("recon report identities and weight duality") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = gen::between(rng, 1, 6), d = gen::between(rng, 1, 6);
    const Matrix x = gen::gaussian_matrix(rng, n, d);
    const Matrix y = gen::gaussian_matrix(rng, n, d, gen::uniform(rng, 0.1, 3.0));
    const double eps = 1e-8;
    const auto r = recon_loss(x, y, eps);
    const double total = r.w_mse + r.w_cosine;
    CHECK(total >= 0.0);
    CHECK(total <= 1.0);
    CHECK(total == doctest::Approx((r.l_mse + r.l_cosine) / (r.l_mse + r.l_cosine + eps)).epsilon(1e-15));
    CHECK(r.l_recon == r.w_mse * r.l_mse + r.w_cosine * r.l_cosine);
    if (r.l_mse > r.l_cosine) CHECK(r.w_mse > r.w_cosine);
    if (r.l_mse < r.l_cosine) CHECK(r.w_mse < r.w_cosine);
    CHECK(r.l_mse == doctest::Approx(oracle::mse(x, y)).epsilon(1e-12));
    CHECK(r.l_cosine == doctest::Approx(oracle::mean_cosine_loss(x, y)).epsilon(1e-12));
  }
}

TEST_CASE("backward matches central finite differences") {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    auto inst = gradcheck::random_autoencoder(rng);
    CHECK(gradcheck::max_autoencoder_error(inst) < 1e-4);
  }
}

TEST_CASE("backward with an injected latent gradient") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    auto inst = gradcheck::random_autoencoder(rng);
    const Matrix g = gen::gaussian_matrix(rng, inst.batch.rows(), inst.params.latent_dim());
    CHECK(gradcheck::max_autoencoder_error(inst, &g, &g) < 1e-4);
  }
}

TEST_CASE("backward: perfect reconstruction has zero gradient") {
  const Matrix x{{0.5, 2.0}};
  auto p = identity_pair();
  const double inv = 1.0 / kSeluLambda;
  p.decoder[0].weights = Matrix{{inv, 0}, {0, inv}};
  const auto fwd = forward(p, x);
  const auto bwd = backward(p, fwd.cache, x, 1e-8, 0.0);
  CHECK(grad_norm(bwd.grads) < 1e-9);
}

TEST_CASE("backward is linear in the l2 coefficient") {
  Rng rng(8);
  auto inst = gradcheck::random_autoencoder(rng);
  const auto fwd = forward(inst.params, inst.batch);
  const double c = 0.01;
  const auto b0 = backward(inst.params, fwd.cache, inst.batch, 1e-8, 0.0);
  const auto b1 = backward(inst.params, fwd.cache, inst.batch, 1e-8, c);
  const auto b2 = backward(inst.params, fwd.cache, inst.batch, 1e-8, 2 * c);
  const auto g0 = b0.grads.tensors(), g1 = b1.grads.tensors(), g2 = b2.grads.tensors();
  for (std::size_t t = 0; t < g0.size(); ++t)
    for (std::size_t k = 0; k < g0[t].size(); ++k)
      CHECK(std::abs((g2[t][k] - g1[t][k]) - (g1[t][k] - g0[t][k])) < 1e-10);
  // Biases carry no decay.
  CHECK(g1[1][0] == g0[1][0]);
}

TEST_CASE("adam first step moves by -lr * sign(g)") {
  Rng rng(9);
  const std::vector<std::size_t> dims{3, 2};
  auto p = init_params(dims, rng);
  const auto before = p;
  auto g = p.zeros_like();
  for (auto& t : g.tensors())
    for (auto& v : t) v = gen::uniform(rng, -2.0, 2.0);
  auto state = AdamState::for_params(p);
  adam_step(p, g, state, 1e-3);
  CHECK(state.step == 1);
  const auto a = before.tensors(), b = std::as_const(p).tensors(), gt = std::as_const(g).tensors();
  for (std::size_t t = 0; t < a.size(); ++t)
    for (std::size_t k = 0; k < a[t].size(); ++k)
      CHECK(std::abs((b[t][k] - a[t][k]) + 1e-3 * (gt[t][k] > 0 ? 1.0 : -1.0)) < 1e-6);
}

TEST_CASE("adam with zero gradient leaves params and decays moments") {
  Rng rng(10);
  const std::vector<std::size_t> dims{3, 2};
  auto p = init_params(dims, rng);
  auto g = p.zeros_like();
  for (auto& t : g.tensors())
    for (auto& v : t) v = 1.0;
  auto state = AdamState::for_params(p);
  adam_step(p, g, state, 1e-3);
  const auto after_one = p;
  const double m1 = state.m.encoder[0].weights(0, 0);
  adam_step(p, p.zeros_like(), state, 0.0);
  CHECK(p == after_one);
  CHECK(state.m.encoder[0].weights(0, 0) < m1);

  auto p1 = after_one, p2 = after_one;
  auto s1 = state, s2 = state;
  adam_step(p1, g, s1, 1e-2);
  adam_step(p2, g, s2, 1e-2);
  CHECK(p1 == p2);
}

TEST_CASE("pretrain: zero epochs returns the initialization") {
  Rng data_rng(11);
  const Matrix x = gen::gaussian_matrix(data_rng, 10, 4);
  AutoencoderConfig c;
  c.layer_dims = {4, 3, 2};
  c.epochs = 0;
  c.seed = 5;
  const auto r = pretrain(x, c);
  Rng init(derive_seed(5, "ae_init"));
  CHECK(r.params == init_params(c.layer_dims, init));
  CHECK(r.loss_curve.empty());
}

TEST_CASE("pretrain halves the loss on two blobs and is deterministic") {
  Rng rng(12);
  Matrix x(200, 16);
  for (std::size_t i = 0; i < 200; ++i)
    for (std::size_t c = 0; c < 16; ++c) x(i, c) = (i % 2 ? 3.0 : -3.0) * (c < 8) + rng.gaussian();
  AutoencoderConfig c;
  c.layer_dims = {16, 32, 16, 4};
  c.epochs = 100;
  c.seed = 1;
  const auto a = pretrain(x, c);
  REQUIRE(a.loss_curve.size() == 100);
  CHECK(a.loss_curve.back() < 0.5 * a.loss_curve.front());
  CHECK(a.params.all_finite());
  const auto b = pretrain(x, c);
  CHECK(a.loss_curve == b.loss_curve);
  CHECK(a.params == b.params);
}

TEST_CASE("config validation") {
  AutoencoderConfig c;
  c.layer_dims = {4};
  CHECK_THROWS_AS(c.validate(), Error);
  c.layer_dims = {4, 0};
  CHECK_THROWS_AS(c.validate(), Error);
  c.layer_dims = {4, 2};
  c.batch_size = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.batch_size = 16;
  CHECK_NOTHROW(c.validate());
  CHECK(AutoencoderConfig::default_hidden_dims() == std::vector<std::size_t>{2048, 1024, 512, 256, 128});
}

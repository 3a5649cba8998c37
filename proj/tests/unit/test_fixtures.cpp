#include <doctest.h>

#include <string>

#include "sdec/io.hpp"
#include "tempdir.hpp"

using namespace sdec;

namespace {

std::string fixture(const char* name) { return std::string(SDEC_FIXTURE_DIR) + "/" + name; }

}  // namespace

TEST_CASE("vector fixture loads and re-saves byte-identically") {
  const auto f = load_embeddings(fixture("vectors_v1.sdec"));
  CHECK(f.header.version == 1);
  CHECK(f.header.kind == EmbeddingKind::vectors);
  CHECK(f.vectors == Matrix{{0.5, -1.25, 3.0}, {0.0, 1024.0, -0.125}});

  testfs::TempDir dir;
  save_embeddings(dir.file("v.sdec"), f.vectors);
  CHECK(testfs::read_bytes(dir.file("v.sdec")) == testfs::read_bytes(fixture("vectors_v1.sdec")));
}

TEST_CASE("sequence fixture") {
  const auto f = load_embeddings(fixture("sequences_v1.sdec"));
  CHECK(f.header.kind == EmbeddingKind::sequences);
  REQUIRE(f.sequences.size() == 2);
  CHECK(f.sequences[0].tokens == Matrix{{1, 2}, {3, -4}, {0.25, 0.75}});
  CHECK(f.sequences[1].tokens == Matrix{{-8, 16}});

  testfs::TempDir dir;
  save_sequences(dir.file("s.sdec"), f.sequences);
  CHECK(testfs::read_bytes(dir.file("s.sdec")) == testfs::read_bytes(fixture("sequences_v1.sdec")));
}

TEST_CASE("checkpoint fixture") {
  const auto loaded = load_checkpoint(fixture("model_v1.ckpt"), 0x0123456789ABCDEFULL);
  CHECK_FALSE(loaded.hash_mismatch);
  const auto& p = loaded.checkpoint.params;
  CHECK(p.layer_dims() == std::vector<std::size_t>{2, 1});
  CHECK(p.encoder[0].weights == Matrix{{0.5, -0.25}});
  CHECK(p.encoder[0].bias == std::vector<double>{0.1});
  CHECK(p.decoder[0].weights == Matrix{{2.0}, {-1.0}});
  CHECK(p.decoder[0].bias == std::vector<double>{0.0, 0.125});
  REQUIRE(loaded.checkpoint.model.has_value());
  CHECK(loaded.checkpoint.model->centroids == Matrix{{-1.5}, {1.5}});
  CHECK(loaded.checkpoint.model->alpha == 1.0);

  // z = selu(0.5 * 1 - 0.25 * 2 + 0.1)
  const Matrix z = encode(p, Matrix{{1.0, 2.0}});
  CHECK(z(0, 0) == doctest::Approx(1.0507009873554805 * 0.1).epsilon(1e-15));

  testfs::TempDir dir;
  save_checkpoint(dir.file("m.ckpt"), p, &*loaded.checkpoint.model, loaded.checkpoint.config_hash);
  CHECK(testfs::read_bytes(dir.file("m.ckpt")) == testfs::read_bytes(fixture("model_v1.ckpt")));
}

TEST_CASE("label fixture") { CHECK(load_labels(fixture("labels_v1.csv"), 2) == Labels{1, 0}); }

#include "acoso/checkpoint.hpp"
#include "acoso/error.hpp"
#include "acoso/io.hpp"
#include "test_util.hpp"
#include "toy_model.hpp"

#include <doctest.h>

using namespace acoso;

namespace {

Checkpoint sample(std::uint64_t seed) {
    Checkpoint cp;
    cp.iteration = 3;
    cp.epoch = 7;
    cp.params = acoso::testing::toy_model(seed);
    cp.params.config.learning_rate = 0.125;
    cp.train_accuracy = 0.998;
    cp.train_loss = 0.0051234567890123;
    return cp;
}

}  // namespace

TEST_CASE("checkpoints round-trip bit for bit") {
    testing::TempDir dir;
    const auto cp = sample(1);
    save_checkpoint(cp, dir / "a.ckpt");
    const auto back = load_checkpoint(dir / "a.ckpt");
    CHECK(back.iteration == 3);
    CHECK(back.epoch == 7);
    CHECK(back.train_accuracy == cp.train_accuracy);
    CHECK(back.train_loss == cp.train_loss);
    CHECK(back.params.config == cp.params.config);
    CHECK(back.params.conv == cp.params.conv);
    CHECK(back.params.dense_weights == cp.params.dense_weights);
    CHECK(back.params.dense_bias == cp.params.dense_bias);
    CHECK(*back.params.embedding == *cp.params.embedding);
    CHECK(encode_checkpoint(back) == encode_checkpoint(cp));

    rng::Engine engine(5);
    for (int i = 0; i < 100; ++i) {
        const auto x = acoso::testing::toy_input(cp.params, engine);
        CHECK(forward(back.params, x) == forward(cp.params, x));
    }
}

TEST_CASE("checkpoint container carries its own configuration") {
    auto cp = sample(2);
    cp.params.config.filter_widths = {1, 4, 5};
    cp.params.config.filters_per_width = 2;
    cp.params.config.fine_tune_embeddings = false;
    cp.params = init_model(cp.params.config, cp.params.embedding);
    const auto back = decode_checkpoint(encode_checkpoint(cp));
    CHECK(back.params.config.filter_widths == std::vector<std::size_t>{1, 4, 5});
    CHECK(back.params.conv == cp.params.conv);
}

TEST_CASE("corrupted, truncated and foreign checkpoints are rejected") {
    const auto bytes = encode_checkpoint(sample(3));
    for (std::size_t pos : {std::size_t{0}, std::size_t{9}, std::size_t{40}, bytes.size() / 2,
                            bytes.size() - 1}) {
        auto bad = bytes;
        bad[pos] = static_cast<char>(bad[pos] ^ 0x10);
        CHECK_THROWS_AS(decode_checkpoint(bad), CheckpointError);
    }
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, bytes.size() - 5)), CheckpointError);
    CHECK_THROWS_AS(decode_checkpoint(bytes.substr(0, 6)), CheckpointError);
    CHECK_THROWS_AS(decode_checkpoint(bytes + "x"), CheckpointError);
    CHECK_THROWS_AS(decode_checkpoint(""), CheckpointError);

    testing::TempDir dir;
    CHECK_THROWS_AS(load_checkpoint(dir / "missing.ckpt"), Error);
    io::write_file_atomic(dir / "text.ckpt", "id,label,text\n");
    CHECK_THROWS_AS(load_checkpoint(dir / "text.ckpt"), CheckpointError);
}

#include <gtest/gtest.h>

#include "codesum/config.hpp"
#include "codesum/error.hpp"

using namespace codesum;

TEST(Config, PresetsDifferInScale) {
  const auto desk = preset_config(Preset::kDesk);
  EXPECT_EQ(desk.extractor.embed_dim, 64u);
  EXPECT_EQ(desk.abstracter.hidden_dim, 64u);
  EXPECT_EQ(desk.extractor.max_vocab, 2000u);
  EXPECT_EQ(desk.extractor.epochs, 300u);
  const auto full = preset_config(Preset::kFull);
  EXPECT_EQ(full.extractor.embed_dim, 512u);
  EXPECT_EQ(full.abstracter.hidden_dim, 512u);
  EXPECT_EQ(full.abstracter.batch_size, 32u);
  EXPECT_DOUBLE_EQ(full.extractor.lr, 3e-4);
  EXPECT_DOUBLE_EQ(full.abstracter.dropout, 0.1);
  EXPECT_THROW(parse_preset("huge"), UsageError);
}

TEST(Config, ParsesSharedAndPrefixedKeys) {
  const auto c = parse_config(
      "# comment line\n"
      "embed_dim = 32\n"
      "abstracter.embed_dim = 48   # trailing comment\n"
      "lr=0.01\n"
      "fusion = exab\n"
      "share_embeddings = false\n"
      "language = python\n"
      "seed = 42\n"
      "corpus = data/train.jsonl\n",
      preset_config(Preset::kDesk));
  EXPECT_EQ(c.extractor.embed_dim, 32u);
  EXPECT_EQ(c.abstracter.embed_dim, 48u);
  EXPECT_DOUBLE_EQ(c.extractor.lr, 0.01);
  EXPECT_DOUBLE_EQ(c.abstracter.lr, 0.01);
  EXPECT_EQ(c.abstracter.fusion, FusionOrder::kExAb);
  EXPECT_FALSE(c.abstracter.share_embeddings);
  EXPECT_EQ(c.language, Language::kPython);
  EXPECT_EQ(c.seed, 42u);
  EXPECT_EQ(c.corpus, "data/train.jsonl");
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  const auto base = preset_config(Preset::kDesk);
  EXPECT_THROW(parse_config("embedding_size = 3\n", base), ConfigError);
  EXPECT_THROW(parse_config("epochs = -1\n", base), ConfigError);
  EXPECT_THROW(parse_config("lr = fast\n", base), ConfigError);
  EXPECT_THROW(parse_config("fusion = both\n", base), ConfigError);
  EXPECT_THROW(parse_config("just words\n", base), ConfigError);
  EXPECT_THROW(parse_config("extractor.max_vocab = 10\n", base), ConfigError);
}

TEST(Config, FinalizeValidatesAndPropagatesSeed) {
  auto c = parse_config("seed = 5\n", preset_config(Preset::kDesk));
  c.finalize();
  EXPECT_EQ(c.extractor.seed, 5u);
  EXPECT_EQ(c.abstracter.seed, 5u);
  auto bad = parse_config("dropout = 1.5\n", preset_config(Preset::kDesk));
  EXPECT_THROW(bad.finalize(), ConfigError);
}

TEST(Config, SeedOverride) {
  auto c = preset_config(Preset::kDesk);
  apply_seed_override(c, "1234");
  EXPECT_EQ(c.seed, 1234u);
  apply_seed_override(c, nullptr);
  apply_seed_override(c, "");
  EXPECT_EQ(c.seed, 1234u);
  EXPECT_THROW(apply_seed_override(c, "abc"), ConfigError);
}

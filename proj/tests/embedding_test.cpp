#include <gtest/gtest.h>

#include <sstream>

#include "ontoalign/embedding.hpp"
#include "ontoalign/error.hpp"

namespace ontoalign {
namespace {

using Tokens = std::vector<std::string>;

TEST(Tokenize, SplitsLabels) {
  EXPECT_EQ(tokenize("hasBeenAssigned"), (Tokens{"has", "been", "assigned"}));
  EXPECT_EQ(tokenize("Meta_Review"), (Tokens{"meta", "review"}));
  EXPECT_EQ(tokenize(""), Tokens{});
  EXPECT_EQ(tokenize("  Program  committee-member "), (Tokens{"program", "committee", "member"}));
  EXPECT_EQ(tokenize("PCMember"), (Tokens{"pc", "member"}));
  EXPECT_EQ(tokenize("paper2Review"), (Tokens{"paper2", "review"}));
  EXPECT_EQ(tokenize("__--"), Tokens{});
  EXPECT_EQ(normalize_label("Meta_Review"), "meta review");
}

TEST(HashEmbed, DeterministicAndNormalized) {
  const auto a = hash_embed({"person"}, 512, 0);
  EXPECT_EQ(a, hash_embed({"person"}, 512, 0));
  EXPECT_NEAR(a.norm(), 1.0, 1e-12);
  EXPECT_NE(a, hash_embed({"person"}, 512, 1));
  EXPECT_NE(a, hash_embed({"paper"}, 512, 0));
  EXPECT_EQ(hash_embed({}, 16, 0), Vec::Zero(16));
  const auto b = hash_embed({"program", "committee"}, 64, 3);
  EXPECT_EQ(b.size(), 64);
  EXPECT_NEAR(b.norm(), 1.0, 1e-12);
}

TEST(EmbeddingStore, LookupNormalizesLabels) {
  EmbeddingStore store(3);
  Vec v(3);
  v << 1, 2, 3;
  store.insert("person", v);
  EXPECT_EQ(store.lookup("Person"), v);
  EXPECT_TRUE(store.contains("PERSON"));
  store.insert("Program_Committee", v * 2);
  EXPECT_EQ(store.lookup("program committee"), v * 2);
}

TEST(EmbeddingStore, MissWithFailNamesTheLabel) {
  EmbeddingStore store(3);
  try {
    store.lookup("ReviewForm");
    FAIL() << "expected MissingEmbeddingError";
  } catch (const MissingEmbeddingError& e) {
    EXPECT_EQ(e.label(), "review form");
  }
}

TEST(EmbeddingStore, MissWithHashFallback) {
  EmbeddingStore store(32, {EmbeddingFallback::Kind::HashEmbed, 5});
  const auto a = store.lookup("ReviewForm");
  EXPECT_EQ(a, store.lookup("ReviewForm"));
  EXPECT_EQ(a, hash_embed({"review", "form"}, 32, 5));
}

TEST(EmbeddingStore, RejectsBadVectors) {
  EmbeddingStore store(3);
  EXPECT_THROW(store.insert("a", Vec::Zero(2)), FormatError);
  Vec nan = Vec::Zero(3);
  nan[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(store.insert("a", nan), FormatError);
}

TEST(EmbeddingFile, RoundTripIsExact) {
  EmbeddingStore store(4);
  store.insert("person", Vec::LinSpaced(4, -1.0 / 3.0, 2.0 / 7.0));
  store.insert("program committee", hash_embed({"program", "committee"}, 4, 1));
  std::stringstream buf;
  write_store(store, buf);
  EXPECT_EQ(buf.str().substr(0, 6), "dim=4\n");
  EXPECT_EQ(read_store(buf), store);
}

TEST(EmbeddingFile, RowLengthMismatchNamesTheLine) {
  std::stringstream in("dim=3\nperson\t1 2 3\npaper\t1 2\n");
  try {
    read_store(in);
    FAIL() << "expected FormatError";
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  std::stringstream header("dim=512\nperson\t" + std::string("0.5 ") + "\n");
  EXPECT_THROW(read_store(header), FormatError);
  std::stringstream no_header("person\t1 2 3\n");
  EXPECT_THROW(read_store(no_header), FormatError);
}

TEST(EmbeddingFile, EmptyBodyWithFallback) {
  std::stringstream in("dim=8\n");
  const auto store = read_store(in, {EmbeddingFallback::Kind::HashEmbed, 0});
  EXPECT_EQ(store.size(), 0U);
  EXPECT_EQ(store.lookup("person"), hash_embed({"person"}, 8, 0));
}

}  // namespace
}  // namespace ontoalign

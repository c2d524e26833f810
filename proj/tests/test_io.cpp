#include <bit>
#include <cstdint>
#include <filesystem>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "fans/csv.hpp"
#include "fans/fans.hpp"
#include "fans/model_io.hpp"
#include "fans/simgen.hpp"

namespace {

using fans::Error;
using fans::ErrorCode;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no fans::Error thrown";
  return ErrorCode::kIo;
}

fans::Dataset parse(const std::string& text, std::optional<std::string> label = "label") {
  std::istringstream in(text);
  return fans::csv::read_csv(in, label);
}

TEST(Csv, ParsesLabeledFile) {
  const auto d = parse("a,label,b\n1.5,1,-2\n0,0,3e2\n");
  EXPECT_EQ(d.rows(), 2u);
  EXPECT_EQ(d.cols(), 2u);
  EXPECT_EQ(d.feature_names, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(*d.labels, (fans::Labels{1, 0}));
  EXPECT_EQ(d.features(1, 1), 300.0);
  EXPECT_FALSE(parse("a,b\n1,2\n", std::nullopt).labels.has_value());
}

TEST(Csv, ErrorsNameRowAndColumn) {
  try {
    parse("a,b,label\n1,2,0\n3,x,1\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_NE(std::string(e.what()).find("row 2, column b"), std::string::npos) << e.what();
  }
  EXPECT_EQ(code_of([] { parse("a,label\n1,2\n"); }), ErrorCode::kLabelDomain);
  EXPECT_EQ(code_of([] { parse("a,label\n1\n"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse("a,b\n1,2\n"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse("a,label\nnan,1\n"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { parse(""); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { fans::csv::load_csv("/nonexistent/file.csv", "label"); }), ErrorCode::kIo);
}

TEST(Csv, RoundTripIsExact) {
  fans::sim::SimSpec spec;
  spec.example = fans::sim::Example::kEx3;
  spec.p = 10;
  spec.n_per_class = 20;
  const auto d = fans::sim::generate(spec).train;
  std::ostringstream out;
  fans::csv::write_csv(out, d);
  const auto back = parse(out.str());
  EXPECT_EQ(back.features, d.features);
  EXPECT_EQ(*back.labels, *d.labels);
  EXPECT_EQ(fans::csv::format_double(0.1), "0.1");
}

fans::FansModel small_model(fans::Variant variant = fans::Variant::kFans) {
  fans::sim::SimSpec spec;
  spec.example = fans::sim::Example::kEx3;
  spec.p = 10;
  spec.n_per_class = 30;
  const auto d = fans::sim::generate(spec).train;
  fans::FansConfig c;
  c.variant = variant;
  c.splits = 2;
  c.lambda_count = 20;
  c.workers = 1;
  return fans::train(d, c);
}

TEST(ModelIo, RoundTripIsBitIdentical) {
  for (auto variant : {fans::Variant::kFans, fans::Variant::kFans2}) {
    const auto m = small_model(variant);
    const auto back = fans::io::parse_model(fans::io::to_json(m).dump(1));
    EXPECT_EQ(fans::io::to_json(back).dump(), fans::io::to_json(m).dump());
    fans::sim::SimSpec spec;
    spec.example = fans::sim::Example::kEx3;
    spec.p = 10;
    spec.n_per_class = 30;
    spec.seed = 77;
    const auto x = fans::sim::generate(spec).test.features;
    const auto a = fans::predict_proba(m, x), b = fans::predict_proba(back, x);
    for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_EQ(std::bit_cast<std::uint64_t>(a[i]), std::bit_cast<std::uint64_t>(b[i]));
  }
}

TEST(ModelIo, FileRoundTrip) {
  const auto m = small_model();
  const auto path = (std::filesystem::temp_directory_path() / "fans_io_model.json").string();
  fans::io::save_model(m, path);
  EXPECT_EQ(fans::io::to_json(fans::io::load_model(path)).dump(), fans::io::to_json(m).dump());
  std::filesystem::remove(path);
  EXPECT_EQ(code_of([&] { fans::io::load_model(path); }), ErrorCode::kIo);
}

TEST(ModelIo, VersionMismatch) {
  auto doc = fans::io::to_json(small_model());
  doc["format_version"] = 2;
  EXPECT_EQ(code_of([&] { fans::io::from_json(doc); }), ErrorCode::kVersion);
}

TEST(ModelIo, TruncatedFile) {
  const std::string text = fans::io::to_json(small_model()).dump(1);
  EXPECT_EQ(code_of([&] { fans::io::parse_model(text.substr(0, text.size() / 2)); }), ErrorCode::kSchema);
  auto doc = fans::io::to_json(small_model());
  doc.erase("submodels");
  EXPECT_EQ(code_of([&] { fans::io::from_json(doc); }), ErrorCode::kSchema);
}

TEST(ModelIo, RoundedNumberFailsChecksum) {
  auto doc = fans::io::to_json(small_model());
  double& v = doc["submodels"][0]["densities"]["class1"][0]["samples"][0].get_ref<double&>();
  v = std::round(v * 1e6) / 1e6;
  EXPECT_EQ(code_of([&] { fans::io::from_json(doc); }), ErrorCode::kChecksum);
}

TEST(ModelIo, RecordsGenerator) {
  const auto doc = fans::io::to_json(small_model());
  EXPECT_EQ(doc["config"]["rng"], "philox4x32-10");
  EXPECT_EQ(doc["format_version"], 1);
}

}  // namespace

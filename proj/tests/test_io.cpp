#include "oracles.hpp"

#include <spafac/error.hpp>
#include <spafac/io.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace spafac;

namespace {

Error error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(ErrorCode::InvalidArgument, "");
}

}  // namespace

TEST(Csv, QuotesCrlfAndBom) {
  const auto t = parse_csv("\xEF\xBB\xBFlabel,\"a,b\",c\r\nx,\"say \"\"hi\"\"\",2\r\n");
  EXPECT_EQ(t.header, (std::vector<std::string>{"label", "a,b", "c"}));
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "say \"hi\"");
  EXPECT_EQ(t.column("c"), 2u);
  EXPECT_EQ(error_of([&] { (void)t.column("d"); }).code(), ErrorCode::ParseError);
}

TEST(Csv, LineRoundTrip) {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", ""};
  const auto t = parse_csv(csv_line(fields) + "\n");
  EXPECT_EQ(t.header, fields);
}

TEST(Csv, ErrorsCarryLocus) {
  const auto ragged = error_of([] { parse_csv("a,b\n1,2\n3\n"); });
  EXPECT_EQ(ragged.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(ragged.what()).find("line 3"), std::string::npos) << ragged.what();
  const auto stray = error_of([] { parse_csv("a,b\n1,x\"y\n"); });
  EXPECT_EQ(stray.code(), ErrorCode::ParseError);
  EXPECT_NE(std::string(stray.what()).find("line 2, column 2"), std::string::npos) << stray.what();
  EXPECT_EQ(error_of([] { parse_csv("a,\"b\n"); }).code(), ErrorCode::ParseError);
}

TEST(IngestContingency, Toy) {
  const auto d = ingest_contingency(parse_csv(",c1,c2\nr1,10,0\nr2,0,10\n"));
  EXPECT_EQ(d.table.grand_total(), 20.0);
  EXPECT_EQ(d.table.row_labels, (std::vector<std::string>{"r1", "r2"}));
  EXPECT_EQ(d.table.col_labels, (std::vector<std::string>{"c1", "c2"}));
}

TEST(IngestContingency, ZeroColumn) {
  const auto csv = parse_csv(",a,b,c\nx,1,0,2\ny,3,0,4\n");
  EXPECT_EQ(error_of([&] { ingest_contingency(csv); }).code(), ErrorCode::ZeroMarginal);
  IngestOptions o;
  o.drop_empty = true;
  const auto d = ingest_contingency(csv, o);
  EXPECT_EQ(d.table.counts.cols(), 2);
  EXPECT_EQ(d.dropped_cols, (std::vector<std::string>{"b"}));
  EXPECT_TRUE(d.dropped_rows.empty());
}

TEST(IngestContingency, BadCells) {
  const auto neg = error_of([] { ingest_contingency(parse_csv(",a\nx,-1\n")); });
  EXPECT_EQ(neg.code(), ErrorCode::NegativeCount);
  EXPECT_NE(std::string(neg.what()).find("line 2, column 2"), std::string::npos) << neg.what();
  EXPECT_EQ(error_of([] { ingest_contingency(parse_csv(",a\nx,1.5\n")); }).code(), ErrorCode::ParseError);
  EXPECT_EQ(error_of([] { ingest_contingency(parse_csv(",a\nx,abc\n")); }).code(), ErrorCode::ParseError);
}

TEST(IngestContingency, GroupColumn) {
  IngestOptions o;
  o.group_column = "g";
  const auto d = ingest_contingency(parse_csv("id,g,a,b\n1,u,1,2\n2,v,3,4\n3,u,5,6\n"), o);
  EXPECT_EQ(d.table.counts.cols(), 2);
  EXPECT_EQ(d.groups, (std::vector<std::string>{"u", "v", "u"}));
}

TEST(IngestCategorical, TwoRowsOneVariable) {
  const auto d = ingest_categorical(parse_csv("id,v\n1,a\n2,b\n"));
  EXPECT_EQ(d.table.indicator, Matrix::Identity(2, 2));
  EXPECT_EQ(d.table.level_labels, (std::vector<std::string>{"v=a", "v=b"}));
  EXPECT_EQ(d.table.variable_spans, (std::vector<Span>{{0, 2}}));
}

TEST(IngestCategorical, RowsSumToVariableCountAndDecode) {
  std::mt19937_64 rng(11);
  const std::vector<std::string> names{"x", "y", "z"};
  std::vector<std::vector<std::string>> values(30);
  for (auto& row : values)
    for (int k = 0; k < 3; ++k) row.push_back(std::string(1, static_cast<char>('a' + rng() % (k + 2))));
  const auto d = disjunctive_coding(values, names);
  EXPECT_EQ(d.indicator.rowwise().sum(), Vector::Constant(30, 3.0));
  EXPECT_EQ(decode(d), values);
}

TEST(IngestCategorical, MissingCellAndVariables) {
  const auto miss = error_of([] { ingest_categorical(parse_csv("id,v,w\n1,a,\n2,b,c\n")); });
  EXPECT_EQ(miss.code(), ErrorCode::MissingCell);
  EXPECT_NE(std::string(miss.what()).find("line 2, column 3"), std::string::npos) << miss.what();
  IngestOptions o;
  o.variables = {"w"};
  o.group_column = "g";
  const auto d = ingest_categorical(parse_csv("id,v,w,g\n1,a,p,G1\n2,b,q,G2\n3,a,q,G1\n"), o);
  EXPECT_EQ(d.table.level_labels, (std::vector<std::string>{"w=p", "w=q"}));
  EXPECT_EQ(d.groups, (std::vector<std::string>{"G1", "G2", "G1"}));
}

TEST(BinNumeric, EqualQuartiles) {
  std::vector<double> v(100);
  std::iota(v.begin(), v.end(), 1.0);
  const auto b = bin_numeric(v, BinSpec{4, {}});
  EXPECT_EQ(b.sizes, (std::vector<Index>{25, 25, 25, 25}));
  EXPECT_EQ(b.levels.size(), 4u);
  EXPECT_EQ(b.values[0], b.levels[0]);
  EXPECT_EQ(b.values[99], b.levels[3]);
}

TEST(BinNumeric, ConstantColumn) {
  EXPECT_EQ(error_of([] { bin_numeric(std::vector<double>(10, 3.0), BinSpec{2, {}}); }).code(),
            ErrorCode::TooFewDistinct);
}

TEST(BinNumeric, SkewedLikertMatchesOracle) {
  std::mt19937_64 rng(12);
  const std::vector<double> weights{30, 22, 15, 12, 9, 7, 5};
  for (int trial = 0; trial < 20; ++trial) {
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    std::vector<double> v(60 + trial * 7);
    for (auto& x : v) x = 1 + pick(rng);
    for (int k : {2, 3, 4}) {
      const auto b = bin_numeric(v, BinSpec{k, {}});
      const double ideal = static_cast<double>(v.size()) / k;
      double dev = 0.0;
      for (Index s : b.sizes) dev = std::max(dev, std::abs(static_cast<double>(s) - ideal));
      EXPECT_NEAR(dev, oracle::best_bin_deviation(v, k), 1e-12) << "trial " << trial << " bins " << k;
      EXPECT_EQ(std::accumulate(b.sizes.begin(), b.sizes.end(), Index{0}), static_cast<Index>(v.size()));
    }
  }
}

TEST(BinNumeric, ExplicitBreaks) {
  const auto b = bin_numeric({1, 2, 3, 4, 5, 6}, BinSpec{0, {2, 4}});
  EXPECT_EQ(b.levels, (std::vector<std::string>{"<=2", "(2,4]", ">4"}));
  EXPECT_EQ(b.sizes, (std::vector<Index>{2, 2, 2}));
  EXPECT_EQ(error_of([] { bin_numeric({1, 2}, BinSpec{0, {3, 2}}); }).code(), ErrorCode::InvalidArgument);
}

TEST(NumericColumn, Detection) {
  EXPECT_TRUE(numeric_column({"1", "2.5", "-3e2"}));
  EXPECT_FALSE(numeric_column({"1", "two"}));
}

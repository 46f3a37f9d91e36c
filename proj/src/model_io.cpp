#include "chdnet/model_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace chdnet {

namespace {

template <typename Range, typename Fmt>
void write_list(std::ostream& out, std::string_view key, const Range& values, std::size_t count, Fmt fmt) {
  out << key << ' ' << count;
  for (const auto& v : values) out << ' ' << fmt(v);
  out << '\n';
}

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  std::istringstream expect(std::string_view key) {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of file, expected '" + std::string(key) + "'");
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream row(line);
    std::string word;
    row >> word;
    if (word != key) fail("expected '" + std::string(key) + "', found '" + word + "'");
    return row;
  }

  std::string rest(std::string_view key) {
    auto row = expect(key);
    std::string text;
    std::getline(row >> std::ws, text);
    return text;
  }

  std::vector<double> doubles(std::string_view key) {
    auto row = expect(key);
    std::size_t n = count(row, key);
    std::vector<double> out(n);
    for (auto& v : out) {
      std::string tok;
      row >> tok;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
      if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) fail("bad number in '" + std::string(key) + "'");
    }
    return out;
  }

  std::vector<std::size_t> sizes(std::string_view key) {
    auto row = expect(key);
    std::size_t n = count(row, key);
    std::vector<std::size_t> out(n);
    for (auto& v : out)
      if (!(row >> v)) fail("bad integer in '" + std::string(key) + "'");
    return out;
  }

  std::vector<std::string> words(std::string_view key) {
    auto row = expect(key);
    std::size_t n = count(row, key);
    std::vector<std::string> out(n);
    for (auto& v : out)
      if (!(row >> v)) fail("missing entry in '" + std::string(key) + "'");
    return out;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, "model file line " + std::to_string(line_no_) + ": " + msg);
  }

 private:
  std::size_t count(std::istringstream& row, std::string_view key) {
    std::size_t n = 0;
    if (!(row >> n)) fail("missing count for '" + std::string(key) + "'");
    return n;
  }

  std::istream& in_;
  std::size_t line_no_ = 0;
};

Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), Index(v.size())); }

}  // namespace

void write_model(std::ostream& out, const ModelBundle& b) {
  for (const auto& id : b.feature_ids)
    if (id.empty() || id.find_first_of(" \t\r\n") != std::string::npos)
      throw Error(ErrorKind::InvalidInput, "feature id '" + id + "' cannot be stored in a model file");
  if (b.provenance.find('\n') != std::string::npos) throw Error(ErrorKind::InvalidInput, "provenance must be one line");
  const auto num = [](double v) { return format_double(v); };
  const auto same = [](const auto& v) { return v; };
  const auto& p = b.model.parameters();
  out << kModelMagic << '\n' << "version " << kModelFormatVersion << '\n';
  write_list(out, "layer_sizes", b.model.layer_sizes(), b.model.layer_sizes().size(), same);
  out << "universe " << b.subset.universe_size() << '\n';
  write_list(out, "subset", b.subset.indices(), b.subset.size(), same);
  write_list(out, "feature_ids", b.feature_ids, b.feature_ids.size(), same);
  write_list(out, "standardizer_mean", b.standardizer.mean, std::size_t(b.standardizer.mean.size()), num);
  write_list(out, "standardizer_stddev", b.standardizer.stddev, std::size_t(b.standardizer.stddev.size()), num);
  write_list(out, "parameters", p, std::size_t(p.size()), num);
  out << "provenance " << b.provenance << '\n' << "end\n";
}

ModelBundle read_model(std::istream& in) {
  LineReader r(in);
  r.expect(kModelMagic);
  auto version_row = r.expect("version");
  int version = 0;
  version_row >> version;
  if (version != kModelFormatVersion) r.fail("unsupported format version " + std::to_string(version));

  const auto sizes = r.sizes("layer_sizes");
  std::size_t universe = 0;
  r.expect("universe") >> universe;
  const auto subset = r.sizes("subset");
  ModelBundle b;
  b.feature_ids = r.words("feature_ids");
  b.standardizer.mean = to_vector(r.doubles("standardizer_mean"));
  b.standardizer.stddev = to_vector(r.doubles("standardizer_stddev"));
  const auto params = r.doubles("parameters");
  b.provenance = r.rest("provenance");
  r.expect("end");

  std::vector<Index> layer_sizes(sizes.begin(), sizes.end());
  b.model = MlpModel(layer_sizes, to_vector(params));
  b.subset = FeatureSubset(subset, universe);
  const auto k = Index(b.subset.size());
  if (Index(b.feature_ids.size()) != k || b.standardizer.mean.size() != k || b.standardizer.stddev.size() != k ||
      b.model.inputs() != k)
    throw Error(ErrorKind::Dimension, "model file sections disagree on the selected feature count");
  return b;
}

void save_model(const std::filesystem::path& path, const ModelBundle& bundle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  write_model(out, bundle);
}

ModelBundle load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return read_model(in);
}

Matrix bundle_inputs(const ModelBundle& b, const LabeledDataset& data) {
  if (data.features() != b.subset.universe_size())
    throw Error(ErrorKind::Dimension, "dataset has " + std::to_string(data.features()) + " features, model expects " +
                                          std::to_string(b.subset.universe_size()));
  for (std::size_t j = 0; j < b.subset.size(); ++j)
    if (data.feature_ids()[b.subset.indices()[j]] != b.feature_ids[j])
      throw Error(ErrorKind::InvalidInput, "feature '" + b.feature_ids[j] + "' not found at its recorded column");
  return b.standardizer.apply(take_cols(data.values(), b.subset.indices()));
}

}  // namespace chdnet

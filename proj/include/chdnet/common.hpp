#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chdnet {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Index = Eigen::Index;

/// Binary class label. `Case` is class 0 and wins every tie.
enum class Label : std::uint8_t { Case = 0, Control = 1 };

inline constexpr int class_index(Label l) { return static_cast<int>(l); }
inline constexpr Label other(Label l) { return l == Label::Case ? Label::Control : Label::Case; }

std::string_view to_string(Label l);
Label parse_label(std::string_view token);

using Labels = std::vector<Label>;
using IndexList = std::vector<std::size_t>;

struct ClassCounts {
  std::size_t cases = 0;
  std::size_t controls = 0;
  std::size_t operator[](Label l) const { return l == Label::Case ? cases : controls; }
  std::size_t total() const { return cases + controls; }
};

ClassCounts count_classes(const Labels& labels);

/// Error kinds surfaced through the CLI error record.
enum class ErrorKind { InvalidInput, Parse, Dimension, Config, Numeric, Io };

std::string_view to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Seed derivation. Every randomized unit of work gets
// mix_seed(master, tag, counter) so it can be replayed in isolation.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t tag_hash(std::string_view tag);
std::uint64_t mix_seed(std::uint64_t master, std::string_view tag, std::uint64_t counter = 0);

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Work items must
/// write only to their own output slot; results never depend on scheduling.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Rows of `m` selected by `rows`, in order.
Matrix take_rows(const Matrix& m, const IndexList& rows);
/// Columns of `m` selected by `cols`, in order.
Matrix take_cols(const Matrix& m, const IndexList& cols);

/// Shortest text that parses back to exactly `v`.
std::string format_double(double v);
/// `%.17g` rendering used by the CSV writers.
std::string format_double17(double v);

}  // namespace chdnet

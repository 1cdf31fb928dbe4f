#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace tempering {

using Index = Eigen::Index;

// Bijection between state indices and the semantic states they stand for.
//
// Mixed-radix codecs encode a tuple (s_0, ..., s_{n-1}) with s_j in
// [0, radix) as sum_j s_j * radix^(n-1-j): position 0 is the most
// significant digit. Product states (theta_0, ..., theta_L) and level-to-mode
// assignments (lambda_0, ..., lambda_L) both use this layout, so level 0 is
// the slowest-varying coordinate in every exported fixture.
class StateCodec {
 public:
  enum class Kind { kPlain, kMixedRadix, kExplicit };

  StateCodec() = default;

  static StateCodec plain(Index size, std::string label = "index");
  static StateCodec mixed_radix(int radix, int length, std::string label);
  static StateCodec explicit_states(std::vector<std::vector<int>> states,
                                    std::string label);

  Kind kind() const { return kind_; }
  const std::string& label() const { return label_; }
  Index size() const { return size_; }
  int radix() const { return radix_; }
  int length() const { return length_; }

  std::vector<int> decode(Index index) const;
  Index encode(std::span<const int> state) const;

  bool operator==(const StateCodec& other) const = default;

 private:
  Kind kind_ = Kind::kPlain;
  std::string label_ = "index";
  Index size_ = 0;
  int radix_ = 0;
  int length_ = 0;
  std::vector<std::vector<int>> states_;
  std::map<std::vector<int>, Index> lookup_;
};

// radix^length, or throws BudgetError when it exceeds `budget`.
Index checked_power(int radix, int length, Index budget);

// Mixed-radix helpers without a codec object.
Index encode_mixed_radix(std::span<const int> digits, int radix);
void decode_mixed_radix(Index index, int radix, std::span<int> digits);

}  // namespace tempering

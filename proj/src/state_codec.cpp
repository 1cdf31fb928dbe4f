#include "tempering/state_codec.hpp"

#include <limits>

#include "tempering/error.hpp"

namespace tempering {

Index checked_power(int radix, int length, Index budget) {
  require(radix >= 1 && length >= 0, "mixed-radix space needs radix >= 1");
  Index size = 1;
  for (int j = 0; j < length; ++j) {
    if (size > budget / radix) {
      throw BudgetError("state space " + std::to_string(radix) + "^" +
                        std::to_string(length) + " exceeds budget of " +
                        std::to_string(budget) + " states");
    }
    size *= radix;
  }
  if (size > budget) {
    throw BudgetError("state space of " + std::to_string(size) +
                      " states exceeds budget of " + std::to_string(budget));
  }
  return size;
}

Index encode_mixed_radix(std::span<const int> digits, int radix) {
  Index index = 0;
  for (int d : digits) index = index * radix + d;
  return index;
}

void decode_mixed_radix(Index index, int radix, std::span<int> digits) {
  for (size_t j = digits.size(); j-- > 0;) {
    digits[j] = static_cast<int>(index % radix);
    index /= radix;
  }
}

StateCodec StateCodec::plain(Index size, std::string label) {
  StateCodec c;
  c.kind_ = Kind::kPlain;
  c.label_ = std::move(label);
  c.size_ = size;
  c.length_ = 1;
  return c;
}

StateCodec StateCodec::mixed_radix(int radix, int length, std::string label) {
  StateCodec c;
  c.kind_ = Kind::kMixedRadix;
  c.label_ = std::move(label);
  c.radix_ = radix;
  c.length_ = length;
  c.size_ = checked_power(radix, length, std::numeric_limits<Index>::max());
  return c;
}

StateCodec StateCodec::explicit_states(std::vector<std::vector<int>> states,
                                       std::string label) {
  StateCodec c;
  c.kind_ = Kind::kExplicit;
  c.label_ = std::move(label);
  c.size_ = static_cast<Index>(states.size());
  c.length_ = states.empty() ? 0 : static_cast<int>(states.front().size());
  for (Index s = 0; s < c.size_; ++s) {
    auto [it, inserted] = c.lookup_.emplace(states[static_cast<size_t>(s)], s);
    require(inserted, "explicit codec has a duplicate state");
  }
  c.states_ = std::move(states);
  return c;
}

std::vector<int> StateCodec::decode(Index index) const {
  require(index >= 0 && index < size_, "state index out of range");
  switch (kind_) {
    case Kind::kPlain:
      return {static_cast<int>(index)};
    case Kind::kMixedRadix: {
      std::vector<int> digits(static_cast<size_t>(length_));
      decode_mixed_radix(index, radix_, digits);
      return digits;
    }
    case Kind::kExplicit:
      return states_[static_cast<size_t>(index)];
  }
  return {};
}

Index StateCodec::encode(std::span<const int> state) const {
  switch (kind_) {
    case Kind::kPlain:
      require(state.size() == 1 && state[0] >= 0 && state[0] < size_,
              "plain state out of range");
      return state[0];
    case Kind::kMixedRadix:
      require(static_cast<int>(state.size()) == length_,
              "state has the wrong number of coordinates");
      for (int d : state) require(d >= 0 && d < radix_, "coordinate out of range");
      return encode_mixed_radix(state, radix_);
    case Kind::kExplicit: {
      auto it = lookup_.find(std::vector<int>(state.begin(), state.end()));
      require(it != lookup_.end(), "state is not in the explicit codec");
      return it->second;
    }
  }
  return -1;
}

}  // namespace tempering

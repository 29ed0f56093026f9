#ifndef CFMAC_CHANNEL_HPP_
#define CFMAC_CHANNEL_HPP_

#include <optional>
#include <string>
#include <vector>

#include "cfmac/rng.hpp"

namespace cfmac {

struct CostSpec {
  std::vector<double> table;  // b_j(x) for every symbol of X_j
  double budget = 0.0;        // B_j
  bool operator==(const CostSpec&) const = default;
};

// Memoryless k-user MAC with finite alphabets. The transition tensor is
// stored flat with index order (x_1, ..., x_k, y), y fastest.
struct DiscreteMac {
  int k = 0;
  std::vector<int> input_sizes;
  int output_size = 0;
  std::vector<double> transition;
  // Either empty or one entry per encoder.
  std::vector<CostSpec> costs;

  std::size_t num_inputs() const;
  std::size_t input_index(const std::vector<int>& x) const;
  const double* row(std::size_t input_index) const {
    return transition.data() + input_index * output_size;
  }
  bool operator==(const DiscreteMac&) const = default;
};

struct GaussianMac {
  int k = 0;
  double noise_variance = 1.0;
  std::vector<double> powers;
  double snr(int j) const { return powers.at(j) / noise_variance; }
};

struct Violation {
  std::string what;
  long row = -1;          // input-tuple index, when applicable
  double value = 0.0;     // offending row sum or entry
};

std::optional<Violation> validate(const DiscreteMac& mac);
// Throws std::invalid_argument with the violation text.
void require_valid(const DiscreteMac& mac);

DiscreteMac make_binary_erasure_mac();
// Y = X (single user, noiseless), handy for tests.
DiscreteMac make_identity_channel(int alphabet);
// Builds a MAC from an arbitrary function of the inputs plus uniform noise.
DiscreteMac make_random_mac(const std::vector<int>& input_sizes, int output_size, Rng& rng);

int sample_output(const DiscreteMac& mac, const std::vector<int>& x, Rng& rng);

DiscreteMac channel_from_json_text(const std::string& text);
std::string channel_to_json_text(const DiscreteMac& mac);
DiscreteMac load_channel(const std::string& path);
void save_channel(const DiscreteMac& mac, const std::string& path);

}  // namespace cfmac

#endif  // CFMAC_CHANNEL_HPP_

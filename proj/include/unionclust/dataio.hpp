#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "unionclust/datagen.hpp"
#include "unionclust/numerics.hpp"

namespace unionclust {

/// Raw IDX image tensor: one (rows*cols)-long column per image, row-major
/// pixel order, bytes scaled to [0, 1].
struct MnistImages {
    Index rows = 0;
    Index cols = 0;
    RealMatrix data;

    Index count() const { return data.cols(); }
};

/// Paired 28x28 images and digit labels.
struct MnistSet {
    RealMatrix images; // 784 x N, values in [0, 1]
    std::vector<int> labels;

    Index size() const { return images.cols(); }
};

/// Parses an IDX image file (big-endian magic 0x00000803, then N, rows, cols
/// as big-endian 32-bit, then N*rows*cols unsigned bytes). Wrong magic or a
/// truncated payload is a FormatError.
MnistImages read_idx_images(const std::string& path);

/// Parses an IDX label file (magic 0x00000801, big-endian count, then N
/// bytes each in 0-9).
std::vector<int> read_idx_labels(const std::string& path);

/// Reads matching image and label files; counts must agree and images must
/// be 28x28.
MnistSet load_mnist(const std::string& images_path, const std::string& labels_path);

/// Samples n_per_digit images per requested digit uniformly without
/// replacement (seeded), vectorizes, l2-normalizes, and remaps ground-truth
/// labels to 0..L-1 in ascending digit order. All-zero images are skipped
/// with a warning and replaced by further draws.
Dataset sample_digit_subset(const MnistSet& set, const std::vector<int>& digits,
                            Index n_per_digit, std::uint64_t seed);

// Dataset CSV: one point per row, header `x0,...,x{m-1}[,label]`.
void write_dataset_csv(const Dataset& data, const std::string& path);
Dataset read_dataset_csv(const std::string& path);

/// Headerless numeric CSV matrix (used for user-supplied bases).
RealMatrix read_matrix_csv(const std::string& path);

// Versioned binary round-trip format.
void write_dataset_binary(const Dataset& data, const std::string& path);
Dataset read_dataset_binary(const std::string& path);

/// One experiment trial outcome; serialized with the fixed header
/// `experiment,algorithm,n,trial_seed,error,q_param,tau,L_hat`.
struct ResultRow {
    std::string experiment;
    std::string algorithm;
    Index n = 0;
    std::uint64_t trial_seed = 0;
    double error = 0.0;
    Index q_param = 0; // q or OMP iteration cap; 0 where not applicable
    double tau = 0.0;  // 0 where not applicable
    Index L_hat = 0;
};

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path);

} // namespace unionclust

#include "unionclust/dataio.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "unionclust/rng.hpp"

namespace unionclust {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::uint32_t read_be32(std::istream& in, const std::string& path, const char* what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) {
        throw FormatError(path + ": truncated while reading " + what);
    }
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

std::ifstream open_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return in;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const std::string& path) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(T))) {
        throw FormatError(path + ": truncated");
    }
    return v;
}

} // namespace

MnistImages read_idx_images(const std::string& path) {
    std::ifstream in = open_binary(path);
    const std::uint32_t magic = read_be32(in, path, "magic");
    if (magic != kImageMagic) {
        throw FormatError(path + ": expected image magic 2051, found " +
                          std::to_string(magic));
    }
    const std::uint32_t count = read_be32(in, path, "image count");
    const std::uint32_t rows = read_be32(in, path, "row count");
    const std::uint32_t cols = read_be32(in, path, "column count");
    const std::size_t pixels = std::size_t(rows) * cols;

    std::vector<unsigned char> buffer(pixels);
    MnistImages images;
    images.rows = static_cast<Index>(rows);
    images.cols = static_cast<Index>(cols);
    images.data.resize(static_cast<Index>(pixels), static_cast<Index>(count));
    for (std::uint32_t i = 0; i < count; ++i) {
        in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(pixels));
        if (in.gcount() != static_cast<std::streamsize>(pixels)) {
            throw FormatError(path + ": truncated payload at image " + std::to_string(i));
        }
        for (std::size_t p = 0; p < pixels; ++p) {
            images.data(static_cast<Index>(p), static_cast<Index>(i)) =
                static_cast<double>(buffer[p]) / 255.0;
        }
    }
    return images;
}

std::vector<int> read_idx_labels(const std::string& path) {
    std::ifstream in = open_binary(path);
    const std::uint32_t magic = read_be32(in, path, "magic");
    if (magic != kLabelMagic) {
        throw FormatError(path + ": expected label magic 2049, found " +
                          std::to_string(magic));
    }
    const std::uint32_t count = read_be32(in, path, "label count");
    std::vector<unsigned char> buffer(count);
    if (count > 0) {
        in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(count));
        if (in.gcount() != static_cast<std::streamsize>(count)) {
            throw FormatError(path + ": truncated label payload");
        }
    }
    std::vector<int> labels(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        if (buffer[i] > 9) {
            throw FormatError(path + ": label byte " + std::to_string(buffer[i]) +
                              " outside 0-9 at index " + std::to_string(i));
        }
        labels[i] = buffer[i];
    }
    return labels;
}

MnistSet load_mnist(const std::string& images_path, const std::string& labels_path) {
    MnistImages images = read_idx_images(images_path);
    std::vector<int> labels = read_idx_labels(labels_path);
    if (images.rows != 28 || images.cols != 28) {
        throw FormatError(images_path + ": expected 28x28 images, found " +
                          std::to_string(images.rows) + "x" + std::to_string(images.cols));
    }
    if (images.count() != static_cast<Index>(labels.size())) {
        throw FormatError("image count " + std::to_string(images.count()) +
                          " does not match label count " + std::to_string(labels.size()));
    }
    return MnistSet{std::move(images.data), std::move(labels)};
}

Dataset sample_digit_subset(const MnistSet& set, const std::vector<int>& digits,
                            Index n_per_digit, std::uint64_t seed) {
    if (digits.empty()) throw InvalidInputError("sample_digit_subset: no digits requested");
    if (n_per_digit < 1) throw InvalidInputError("sample_digit_subset: n_per_digit must be >= 1");
    std::set<int> unique(digits.begin(), digits.end());
    if (unique.size() != digits.size()) {
        throw InvalidInputError("sample_digit_subset: duplicate digits requested");
    }
    for (int d : digits) {
        if (d < 0 || d > 9) {
            throw InvalidInputError("sample_digit_subset: digit " + std::to_string(d) +
                                    " outside 0-9");
        }
    }
    std::vector<int> sorted(unique.begin(), unique.end());

    const Index L = static_cast<Index>(sorted.size());
    const Index total = L * n_per_digit;
    Dataset data;
    data.points.resize(set.images.rows(), total);
    data.labels = std::vector<int>(static_cast<std::size_t>(total));
    data.per_cluster_counts.assign(static_cast<std::size_t>(L), n_per_digit);
    if (n_per_digit == 1) {
        data.warnings.push_back("single image per digit; clustering is degenerate");
    }

    Index col = 0;
    for (Index l = 0; l < L; ++l) {
        const int digit = sorted[static_cast<std::size_t>(l)];
        std::vector<Index> candidates;
        for (Index i = 0; i < set.size(); ++i) {
            if (set.labels[static_cast<std::size_t>(i)] == digit) candidates.push_back(i);
        }
        if (static_cast<Index>(candidates.size()) < n_per_digit) {
            throw InvalidInputError("sample_digit_subset: digit " + std::to_string(digit) +
                                    " has only " + std::to_string(candidates.size()) +
                                    " images, need " + std::to_string(n_per_digit));
        }

        Rng rng(derive_seed(seed, "digit-sample", static_cast<std::uint64_t>(digit)));
        for (std::size_t i = candidates.size() - 1; i > 0; --i) {
            std::swap(candidates[i], candidates[rng.below(i + 1)]);
        }

        Index taken = 0;
        for (Index idx : candidates) {
            if (taken == n_per_digit) break;
            const double norm = set.images.col(idx).norm();
            if (norm == 0.0) {
                data.warnings.push_back("all-zero image at index " + std::to_string(idx) +
                                        " skipped; drew a replacement");
                continue;
            }
            data.points.col(col + taken) = set.images.col(idx) / norm;
            ++taken;
        }
        if (taken < n_per_digit) {
            throw InvalidInputError("sample_digit_subset: digit " + std::to_string(digit) +
                                    " has too few nonzero images");
        }
        for (Index i = 0; i < n_per_digit; ++i) {
            (*data.labels)[static_cast<std::size_t>(col + i)] = static_cast<int>(l);
        }
        col += n_per_digit;
    }
    return data;
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_dataset_csv: cannot open " + path);
    const Index m = data.ambient_dim();
    for (Index r = 0; r < m; ++r) {
        out << (r == 0 ? "x" : ",x") << r;
    }
    if (data.labels) out << ",label";
    out << '\n';
    for (Index c = 0; c < data.size(); ++c) {
        for (Index r = 0; r < m; ++r) {
            if (r > 0) out << ',';
            out << format_double(data.points(r, c));
        }
        if (data.labels) out << ',' << (*data.labels)[static_cast<std::size_t>(c)];
        out << '\n';
    }
    if (!out) throw IoError("write_dataset_csv: write failed for " + path);
}

Dataset read_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_dataset_csv: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw FormatError(path + ": missing header");
    std::vector<std::string> header;
    {
        std::size_t start = 0;
        while (start <= line.size()) {
            const std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            header.push_back(line.substr(start, end - start));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    bool has_labels = !header.empty() && header.back() == "label";
    const Index m = static_cast<Index>(header.size()) - (has_labels ? 1 : 0);
    if (m < 1) throw FormatError(path + ": no coordinate columns in header");
    for (Index r = 0; r < m; ++r) {
        if (header[static_cast<std::size_t>(r)] != "x" + std::to_string(r)) {
            throw FormatError(path + ": unexpected header column '" +
                              header[static_cast<std::size_t>(r)] + "'");
        }
    }

    std::vector<double> values;
    std::vector<int> labels;
    Index n = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* ptr = line.c_str();
        for (Index r = 0; r < m; ++r) {
            char* end = nullptr;
            values.push_back(std::strtod(ptr, &end));
            if (end == ptr) throw FormatError(path + ": malformed number in row " +
                                              std::to_string(n + 1));
            ptr = end;
            if (*ptr == ',') ++ptr;
        }
        if (has_labels) {
            char* end = nullptr;
            labels.push_back(static_cast<int>(std::strtol(ptr, &end, 10)));
            if (end == ptr) throw FormatError(path + ": malformed label in row " +
                                              std::to_string(n + 1));
        }
        ++n;
    }
    if (n == 0) throw FormatError(path + ": no data rows");

    Dataset data;
    data.points.resize(m, n);
    for (Index c = 0; c < n; ++c) {
        for (Index r = 0; r < m; ++r) {
            data.points(r, c) = values[static_cast<std::size_t>(c * m + r)];
        }
    }
    if (has_labels) {
        data.labels = std::move(labels);
        int max_label = 0;
        for (int l : *data.labels) max_label = std::max(max_label, l);
        data.per_cluster_counts.assign(static_cast<std::size_t>(max_label) + 1, 0);
        for (int l : *data.labels) ++data.per_cluster_counts[static_cast<std::size_t>(l)];
    }
    return data;
}

RealMatrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("read_matrix_csv: cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        const char* ptr = line.c_str();
        while (true) {
            char* end = nullptr;
            const double v = std::strtod(ptr, &end);
            if (end == ptr) {
                throw FormatError(path + ": malformed number in row " +
                                  std::to_string(rows.size() + 1));
            }
            row.push_back(v);
            ptr = end;
            if (*ptr != ',') break;
            ++ptr;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw FormatError(path + ": ragged rows");
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw FormatError(path + ": empty matrix");

    RealMatrix out(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t c = 0; c < rows[r].size(); ++c) {
            out(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
        }
    }
    return out;
}

void write_dataset_binary(const Dataset& data, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_dataset_binary: cannot open " + path);
    out.write("UCDS", 4);
    write_raw<std::uint32_t>(out, 1); // format version
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(data.ambient_dim()));
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(data.size()));
    write_raw<std::uint8_t>(out, data.labels ? 1 : 0);
    out.write(reinterpret_cast<const char*>(data.points.data()),
              static_cast<std::streamsize>(sizeof(double) * data.points.size()));
    if (data.labels) {
        for (int l : *data.labels) write_raw<std::int32_t>(out, l);
    }
    write_raw<std::uint32_t>(out, static_cast<std::uint32_t>(data.per_cluster_counts.size()));
    for (Index c : data.per_cluster_counts) write_raw<std::int64_t>(out, c);
    if (!out) throw IoError("write_dataset_binary: write failed for " + path);
}

Dataset read_dataset_binary(const std::string& path) {
    std::ifstream in = open_binary(path);
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, "UCDS", 4) != 0) {
        throw FormatError(path + ": not a dataset file (bad magic)");
    }
    const auto version = read_raw<std::uint32_t>(in, path);
    if (version != 1) {
        throw FormatError(path + ": unsupported format version " + std::to_string(version));
    }
    const auto m = read_raw<std::uint32_t>(in, path);
    const auto n = read_raw<std::uint32_t>(in, path);
    const auto has_labels = read_raw<std::uint8_t>(in, path);

    Dataset data;
    data.points.resize(static_cast<Index>(m), static_cast<Index>(n));
    in.read(reinterpret_cast<char*>(data.points.data()),
            static_cast<std::streamsize>(sizeof(double) * data.points.size()));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * data.points.size())) {
        throw FormatError(path + ": truncated point payload");
    }
    if (has_labels != 0) {
        std::vector<int> labels(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            labels[i] = read_raw<std::int32_t>(in, path);
        }
        data.labels = std::move(labels);
    }
    const auto counts = read_raw<std::uint32_t>(in, path);
    data.per_cluster_counts.resize(counts);
    for (std::uint32_t i = 0; i < counts; ++i) {
        data.per_cluster_counts[i] = static_cast<Index>(read_raw<std::int64_t>(in, path));
    }
    return data;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("write_results_csv: cannot open " + path);
    out << "experiment,algorithm,n,trial_seed,error,q_param,tau,L_hat\n";
    for (const ResultRow& row : rows) {
        out << row.experiment << ',' << row.algorithm << ',' << row.n << ','
            << row.trial_seed << ',' << format_double(row.error) << ',' << row.q_param
            << ',' << format_double(row.tau) << ',' << row.L_hat << '\n';
    }
    if (!out) throw IoError("write_results_csv: write failed for " + path);
}

} // namespace unionclust

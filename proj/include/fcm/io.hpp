#ifndef FCM_IO_HPP
#define FCM_IO_HPP

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fcm/dataset.hpp"
#include "fcm/encoding.hpp"
#include "fcm/error.hpp"

namespace fcm {

// ---------------------------------------------------------------------------
// Number formatting. Shortest round-trip representations via to_chars keep
// every emitted file byte-stable and exactly re-parseable.
// ---------------------------------------------------------------------------

inline std::string format_number(double value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    require(ec == std::errc(), ErrorCode::internal, "number formatting failed");
    return std::string(buf, ptr);
}

inline std::string format_number(float value) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    require(ec == std::errc(), ErrorCode::internal, "number formatting failed");
    return std::string(buf, ptr);
}

// ---------------------------------------------------------------------------
// Raw file helpers
// ---------------------------------------------------------------------------

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), ErrorCode::io_failure, "cannot open file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    require(!in.bad(), ErrorCode::io_failure, "read failed: " + path.string());
    return std::move(buffer).str();
}

/// Write-temp-then-rename so readers never observe a partial file.
inline void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(out.good(), ErrorCode::io_failure, "cannot open file for write: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        require(out.good(), ErrorCode::io_failure, "write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    require(!ec, ErrorCode::io_failure, "rename failed: " + path.string());
}

/// FNV-1a 64-bit digest, used for input fingerprints in run manifests.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(bytes)));
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Encoding matrix codecs
//   text:   header "frame_id,n0,...,n{D-1}", one row per frame
//   binary: magic "FCME", u32 frames, u32 dim (little-endian), f32 values
//           row-major, then newline-terminated frame ids
// ---------------------------------------------------------------------------

inline constexpr std::string_view k_encoding_magic = "FCME";

namespace detail_io {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

/// Splits into lines; tolerates CRLF and a missing trailing newline.
inline std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        start = end + 1;
    }
    return lines;
}

inline float parse_float(std::string_view field, std::size_t line_no) {
    float value = 0.0f;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    require(ec == std::errc() && ptr == field.data() + field.size(), ErrorCode::malformed_row,
            "line " + std::to_string(line_no) + ": not a number: '" + std::string(field) + "'");
    return value;
}

inline void put_u32_le(std::string& out, std::uint32_t v) {
    out.push_back(static_cast<char>(v & 0xff));
    out.push_back(static_cast<char>((v >> 8) & 0xff));
    out.push_back(static_cast<char>((v >> 16) & 0xff));
    out.push_back(static_cast<char>((v >> 24) & 0xff));
}

inline std::uint32_t get_u32_le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

}  // namespace detail_io

inline std::string encode_matrix_text(const EncodingMatrix& matrix) {
    matrix.validate();
    std::string out = "frame_id";
    for (std::uint32_t i = 0; i < matrix.dim; ++i) out += ",n" + std::to_string(i);
    out += '\n';
    for (std::size_t f = 0; f < matrix.frames(); ++f) {
        out += matrix.frame_ids[f];
        for (float v : matrix.row(f)) {
            out += ',';
            out += format_number(v);
        }
        out += '\n';
    }
    return out;
}

inline EncodingMatrix decode_matrix_text(std::string_view text) {
    const auto lines = detail_io::split_lines(text);
    require(!lines.empty(), ErrorCode::malformed_header, "encoding file is empty");
    const auto header = detail_io::split_csv_line(lines[0]);
    require(header.size() >= 2 && header[0] == "frame_id", ErrorCode::malformed_header,
            "encoding header must start with 'frame_id' and name at least one neuron");
    for (std::size_t i = 1; i < header.size(); ++i)
        require(header[i] == "n" + std::to_string(i - 1), ErrorCode::malformed_header,
                "encoding header column " + std::to_string(i) + " must be 'n" +
                    std::to_string(i - 1) + "'");
    EncodingMatrix matrix;
    matrix.dim = static_cast<std::uint32_t>(header.size() - 1);
    for (std::size_t l = 1; l < lines.size(); ++l) {
        if (lines[l].empty()) continue;
        const auto fields = detail_io::split_csv_line(lines[l]);
        require(fields.size() == header.size(), ErrorCode::dimension_mismatch,
                "line " + std::to_string(l + 1) + ": expected " +
                    std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
        matrix.frame_ids.emplace_back(fields[0]);
        for (std::size_t i = 1; i < fields.size(); ++i)
            matrix.values.push_back(detail_io::parse_float(fields[i], l + 1));
    }
    matrix.validate();
    return matrix;
}

inline std::string encode_matrix_binary(const EncodingMatrix& matrix) {
    matrix.validate();
    std::string out(k_encoding_magic);
    detail_io::put_u32_le(out, static_cast<std::uint32_t>(matrix.frames()));
    detail_io::put_u32_le(out, matrix.dim);
    static_assert(sizeof(float) == 4);
    for (float v : matrix.values) {
        std::uint32_t bits;
        std::memcpy(&bits, &v, 4);
        detail_io::put_u32_le(out, bits);
    }
    for (const auto& id : matrix.frame_ids) {
        out += id;
        out += '\n';
    }
    return out;
}

inline EncodingMatrix decode_matrix_binary(std::string_view bytes) {
    require(bytes.size() >= 12 && bytes.substr(0, 4) == k_encoding_magic,
            ErrorCode::malformed_header, "not a binary encoding file (bad magic)");
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t frames = detail_io::get_u32_le(p + 4);
    const std::uint32_t dim = detail_io::get_u32_le(p + 8);
    const std::size_t value_bytes = static_cast<std::size_t>(frames) * dim * 4;
    require(bytes.size() >= 12 + value_bytes, ErrorCode::malformed_row,
            "binary encoding file truncated");
    EncodingMatrix matrix;
    matrix.dim = dim;
    matrix.values.resize(static_cast<std::size_t>(frames) * dim);
    for (std::size_t i = 0; i < matrix.values.size(); ++i) {
        const std::uint32_t bits = detail_io::get_u32_le(p + 12 + i * 4);
        std::memcpy(&matrix.values[i], &bits, 4);
    }
    std::string_view tail = bytes.substr(12 + value_bytes);
    for (std::uint32_t f = 0; f < frames; ++f) {
        const std::size_t nl = tail.find('\n');
        require(nl != std::string_view::npos, ErrorCode::malformed_row,
                "binary encoding file is missing frame ids");
        matrix.frame_ids.emplace_back(tail.substr(0, nl));
        tail.remove_prefix(nl + 1);
    }
    require(tail.empty(), ErrorCode::malformed_row,
            "binary encoding file has trailing bytes");
    matrix.validate();
    return matrix;
}

/// Reads either codec, sniffing the binary magic.
inline EncodingMatrix read_encodings(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    if (bytes.size() >= 4 && std::string_view(bytes).substr(0, 4) == k_encoding_magic)
        return decode_matrix_binary(bytes);
    return decode_matrix_text(bytes);
}

enum class EncodingFormat { text, binary };

inline void write_encodings(const std::filesystem::path& path, const EncodingMatrix& matrix,
                            EncodingFormat format) {
    atomic_write_file(path, format == EncodingFormat::binary ? encode_matrix_binary(matrix)
                                                             : encode_matrix_text(matrix));
}

// ---------------------------------------------------------------------------
// Labels codec: header "frame_id,<concept>,..." with 0/1 cells, multi-label.
// ---------------------------------------------------------------------------

struct LabelTable {
    std::vector<std::string> frame_ids;
    std::vector<std::string> concept_names;
    std::vector<std::vector<std::uint32_t>> labels;  // sorted concept indices per frame
};

inline std::string encode_labels(const LabelTable& table) {
    std::string out = "frame_id";
    for (const auto& name : table.concept_names) out += "," + name;
    out += '\n';
    for (std::size_t f = 0; f < table.frame_ids.size(); ++f) {
        out += table.frame_ids[f];
        const auto& set = table.labels[f];
        std::size_t cursor = 0;
        for (std::uint32_t c = 0; c < table.concept_names.size(); ++c) {
            const bool on = cursor < set.size() && set[cursor] == c;
            if (on) ++cursor;
            out += on ? ",1" : ",0";
        }
        out += '\n';
    }
    return out;
}

inline LabelTable decode_labels(std::string_view text) {
    const auto lines = detail_io::split_lines(text);
    require(!lines.empty(), ErrorCode::malformed_header, "labels file is empty");
    const auto header = detail_io::split_csv_line(lines[0]);
    require(header.size() >= 2 && header[0] == "frame_id", ErrorCode::malformed_header,
            "labels header must start with 'frame_id' and name at least one concept");
    LabelTable table;
    for (std::size_t i = 1; i < header.size(); ++i) {
        require(!header[i].empty(), ErrorCode::malformed_header, "empty concept column name");
        for (std::size_t j = 1; j < i; ++j)
            require(header[j] != header[i], ErrorCode::malformed_header,
                    "duplicate concept column: '" + std::string(header[i]) + "'");
        table.concept_names.emplace_back(header[i]);
    }
    std::map<std::string_view, std::size_t> seen;
    for (std::size_t l = 1; l < lines.size(); ++l) {
        if (lines[l].empty()) continue;
        const auto fields = detail_io::split_csv_line(lines[l]);
        require(fields.size() == header.size(), ErrorCode::dimension_mismatch,
                "labels line " + std::to_string(l + 1) + ": expected " +
                    std::to_string(header.size()) + " fields, got " +
                    std::to_string(fields.size()));
        require(seen.emplace(fields[0], l).second, ErrorCode::duplicate_frame_id,
                "duplicate frame id in labels: " + std::string(fields[0]));
        table.frame_ids.emplace_back(fields[0]);
        std::vector<std::uint32_t> set;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            require(fields[i] == "0" || fields[i] == "1", ErrorCode::malformed_row,
                    "labels line " + std::to_string(l + 1) + ": cells must be 0 or 1");
            if (fields[i] == "1") set.push_back(static_cast<std::uint32_t>(i - 1));
        }
        table.labels.push_back(std::move(set));
    }
    return table;
}

inline LabelTable read_labels(const std::filesystem::path& path) {
    return decode_labels(read_file(path));
}

inline void write_labels(const std::filesystem::path& path, const LabelTable& table) {
    atomic_write_file(path, encode_labels(table));
}

inline LabelTable labels_of(const LabeledDataset& data) {
    return LabelTable{data.frame_ids, data.concept_names, data.labels};
}

// ---------------------------------------------------------------------------
// Dataset assembly
// ---------------------------------------------------------------------------

inline BinarizeMode parse_binarize_mode(std::string_view text) {
    if (text == "adaptive") return {BinarizeMode::Kind::adaptive, 0.0};
    if (text.starts_with("fixed:")) {
        const std::string_view number = text.substr(6);
        double t = 0.0;
        const auto [ptr, ec] = std::from_chars(number.data(), number.data() + number.size(), t);
        require(ec == std::errc() && ptr == number.data() + number.size() && t >= 0.0,
                ErrorCode::invalid_argument,
                "fixed binarize threshold must be a nonnegative number");
        return {BinarizeMode::Kind::fixed, t};
    }
    raise(ErrorCode::invalid_argument,
          "binarize mode must be 'adaptive' or 'fixed:<t>', got '" + std::string(text) + "'");
}

/// Joins an encoding matrix with a label table. Every labeled frame id must
/// exist in the matrix; matrix frames without labels get an empty concept
/// set. Mask order follows the matrix.
inline LabeledDataset assemble_dataset(const EncodingMatrix& matrix, const LabelTable& labels,
                                       const BinarizeMode& mode) {
    std::map<std::string_view, std::size_t> row_of;
    for (std::size_t f = 0; f < matrix.frames(); ++f) row_of.emplace(matrix.frame_ids[f], f);
    LabeledDataset data;
    data.frame_ids = matrix.frame_ids;
    data.concept_names = labels.concept_names;
    data.labels.assign(matrix.frames(), {});
    for (std::size_t l = 0; l < labels.frame_ids.size(); ++l) {
        const auto it = row_of.find(labels.frame_ids[l]);
        require(it != row_of.end(), ErrorCode::unlabeled_frame_reference,
                "unlabeled frame reference: '" + labels.frame_ids[l] +
                    "' is not in the encoding matrix");
        data.labels[it->second] = labels.labels[l];
    }
    data.masks = binarize_matrix(matrix, mode);
    data.validate();
    return data;
}

inline LabeledDataset load_dataset(const std::filesystem::path& encodings_path,
                                   const std::filesystem::path& labels_path,
                                   const BinarizeMode& mode) {
    return assemble_dataset(read_encodings(encodings_path), read_labels(labels_path), mode);
}

}  // namespace fcm

#endif  // FCM_IO_HPP

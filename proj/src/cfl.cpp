#include "c2fmc/cfl.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace c2f {

namespace {

constexpr std::size_t max_written_dims = 5;

fs::path with_suffix(const fs::path &stem, const char *suffix) {
    fs::path p = stem;
    p += suffix;
    return p;
}

std::uint32_t to_little(std::uint32_t v) {
    if constexpr (std::endian::native == std::endian::little) {
        return v;
    } else {
        return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
    }
}

std::vector<long> parse_header(const fs::path &hdr) {
    std::ifstream in(hdr);
    if (!in) throw std::runtime_error("cannot open " + hdr.string());
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(hdr.string() + ": empty header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "# Dimensions") throw std::runtime_error(hdr.string() + ": first line must be '# Dimensions'");
    if (!std::getline(in, line)) throw std::runtime_error(hdr.string() + ": missing dimension line");
    std::istringstream ss(line);
    std::vector<long> dims;
    std::string tok;
    while (ss >> tok) {
        std::size_t used = 0;
        long v = 0;
        try {
            v = std::stol(tok, &used);
        } catch (const std::exception &) {
            throw std::runtime_error(hdr.string() + ": bad dimension '" + tok + "'");
        }
        if (used != tok.size() || v < 1) throw std::runtime_error(hdr.string() + ": bad dimension '" + tok + "'");
        dims.push_back(v);
    }
    if (dims.empty()) throw std::runtime_error(hdr.string() + ": no dimensions");
    return dims;
}

void write_atomic(const fs::path &target, const std::string &bytes) {
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, target);
}

const CflArray &require_dims(const CflArray &a, std::size_t rank_at_least, const char *what) {
    if (a.dims.size() < rank_at_least) throw std::runtime_error(std::string(what) + ": too few dimensions");
    return a;
}

// Product of dimensions beyond the first `keep`; must be 1 for a clean fit.
long trailing(const CflArray &a, std::size_t keep) {
    long p = 1;
    for (std::size_t i = keep; i < a.dims.size(); ++i) p *= a.dims[i];
    return p;
}

Shape shape_of(const CflArray &a) { return Shape{static_cast<int>(a.dims[0]), static_cast<int>(a.dims[1])}; }

// Column-major (r, c, k) offset.
std::size_t offset(const Shape &s, int r, int c, std::size_t k) {
    return static_cast<std::size_t>(r) + static_cast<std::size_t>(c) * s.height + k * s.size();
}

}  // namespace

std::size_t CflArray::expected_size() const {
    std::size_t n = 1;
    for (long d : dims) n *= static_cast<std::size_t>(d);
    return n;
}

void cfl_write(const fs::path &stem, const CflArray &array) {
    if (array.dims.empty()) throw std::invalid_argument("cfl_write: no dimensions");
    for (long d : array.dims) {
        if (d < 1) throw std::invalid_argument("cfl_write: dimensions must be positive");
    }
    if (array.data.size() != array.expected_size()) throw std::invalid_argument("cfl_write: data size mismatch");
    for (const auto &v : array.data) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw std::invalid_argument("cfl_write: non-finite data");
    }

    std::ostringstream hdr;
    hdr << "# Dimensions\n";
    const std::size_t rank = std::max(array.dims.size(), max_written_dims);
    for (std::size_t i = 0; i < rank; ++i) {
        if (i) hdr << ' ';
        hdr << (i < array.dims.size() ? array.dims[i] : 1L);
    }
    hdr << '\n';

    std::string payload(array.data.size() * 2 * sizeof(float), '\0');
    char *p = payload.data();
    for (const auto &v : array.data) {
        for (float f : {v.real(), v.imag()}) {
            const std::uint32_t bits = to_little(std::bit_cast<std::uint32_t>(f));
            std::memcpy(p, &bits, sizeof bits);
            p += sizeof bits;
        }
    }
    if (stem.has_parent_path()) fs::create_directories(stem.parent_path());
    write_atomic(with_suffix(stem, ".cfl"), payload);
    write_atomic(with_suffix(stem, ".hdr"), hdr.str());
}

bool cfl_exists(const fs::path &stem) {
    return fs::exists(with_suffix(stem, ".hdr")) && fs::exists(with_suffix(stem, ".cfl"));
}

CflArray cfl_read(const fs::path &stem) {
    CflArray out;
    out.dims = parse_header(with_suffix(stem, ".hdr"));
    const fs::path cfl = with_suffix(stem, ".cfl");
    std::ifstream in(cfl, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + cfl.string());
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t n = out.expected_size();
    if (bytes.size() != n * 2 * sizeof(float)) {
        throw std::runtime_error(cfl.string() + ": payload has " + std::to_string(bytes.size()) + " bytes, header implies " +
                                 std::to_string(n * 2 * sizeof(float)));
    }
    out.data.resize(n);
    const char *p = bytes.data();
    for (std::size_t i = 0; i < n; ++i) {
        float parts[2];
        for (float &f : parts) {
            std::uint32_t bits;
            std::memcpy(&bits, p, sizeof bits);
            p += sizeof bits;
            f = std::bit_cast<float>(to_little(bits));
        }
        out.data[i] = {parts[0], parts[1]};
    }
    return out;
}

CflArray to_cfl(const ComplexImage &img) {
    const Shape s = img.shape();
    CflArray a{{s.height, s.width}, std::vector<std::complex<float>>(s.size())};
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) a.data[offset(s, r, c, 0)] = std::complex<float>(img(r, c));
    }
    return a;
}

ComplexImage image_from_cfl(const CflArray &a) {
    require_dims(a, 2, "image");
    if (trailing(a, 2) != 1) throw std::runtime_error("image: expected a single 2D slice");
    const Shape s = shape_of(a);
    ComplexImage img(s);
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) img(r, c) = std::complex<double>(a.data[offset(s, r, c, 0)]);
    }
    return img;
}

CflArray to_cfl(const RealGrid &g) {
    const Shape s = g.shape();
    CflArray a{{s.height, s.width}, std::vector<std::complex<float>>(s.size())};
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) a.data[offset(s, r, c, 0)] = static_cast<float>(g(r, c));
    }
    return a;
}

RealGrid real_from_cfl(const CflArray &a) {
    const ComplexImage img = image_from_cfl(a);
    RealGrid g(img.shape());
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = img[i].real();
    return g;
}

CflArray to_cfl(const MultiCoilKSpace &y) {
    if (y.coils.empty()) throw std::invalid_argument("to_cfl: no coils");
    const Shape s = y.coils.front().shape();
    CflArray a{{s.height, s.width, static_cast<long>(y.n_coils())},
               std::vector<std::complex<float>>(s.size() * y.n_coils())};
    for (std::size_t k = 0; k < y.n_coils(); ++k) {
        for (int r = 0; r < s.height; ++r) {
            for (int c = 0; c < s.width; ++c) a.data[offset(s, r, c, k)] = std::complex<float>(y.coils[k](r, c));
        }
    }
    return a;
}

MultiCoilKSpace kspace_from_cfl(const CflArray &a) {
    require_dims(a, 2, "k-space");
    const Shape s = shape_of(a);
    const auto n = static_cast<std::size_t>(trailing(a, 2));
    MultiCoilKSpace y;
    for (std::size_t k = 0; k < n; ++k) {
        KSpaceGrid g(s);
        for (int r = 0; r < s.height; ++r) {
            for (int c = 0; c < s.width; ++c) g(r, c) = std::complex<double>(a.data[offset(s, r, c, k)]);
        }
        y.coils.push_back(std::move(g));
    }
    return y;
}

CflArray to_cfl(const DisplacementField &u) {
    const Shape s = u.shape();
    CflArray a{{s.height, s.width, 2}, std::vector<std::complex<float>>(2 * s.size())};
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            a.data[offset(s, r, c, 0)] = static_cast<float>(u.row(r, c));
            a.data[offset(s, r, c, 1)] = static_cast<float>(u.col(r, c));
        }
    }
    return a;
}

DisplacementField field_from_cfl(const CflArray &a) {
    require_dims(a, 3, "field");
    if (a.dims[2] != 2 || trailing(a, 3) != 1) throw std::runtime_error("field: expected dimensions (H, W, 2)");
    const Shape s = shape_of(a);
    DisplacementField u(s);
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            u.row(r, c) = a.data[offset(s, r, c, 0)].real();
            u.col(r, c) = a.data[offset(s, r, c, 1)].real();
        }
    }
    return u;
}

CflArray to_cfl(const SensitivityMaps &maps) {
    MultiCoilKSpace tmp;
    for (const auto &c : maps.coils()) tmp.coils.emplace_back(c.shape(), std::vector<cplx>(c.values().begin(), c.values().end()));
    return to_cfl(tmp);
}

SensitivityMaps maps_from_cfl(const CflArray &a) {
    auto y = kspace_from_cfl(a);
    std::vector<ComplexImage> coils;
    for (auto &g : y.coils) coils.emplace_back(g.shape(), std::vector<cplx>(g.values().begin(), g.values().end()));
    // Single precision storage can push a unit-RSS map a hair above 1.
    const Shape s = coils.front().shape();
    for (std::size_t i = 0; i < s.size(); ++i) {
        double ss = 0.0;
        for (const auto &c : coils) ss += std::norm(c[i]);
        const double rss = std::sqrt(ss);
        if (rss > 1.0 && rss <= 1.0 + 1e-5) {
            for (auto &c : coils) c[i] /= rss;
        }
    }
    return SensitivityMaps(std::move(coils));
}

}  // namespace c2f

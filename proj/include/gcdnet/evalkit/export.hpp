#ifndef GCDNET_EVALKIT_EXPORT_HPP
#define GCDNET_EVALKIT_EXPORT_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gcdnet/errors.hpp"
#include "gcdnet/graphstore/graph.hpp"
#include "gcdnet/numkernel/tensor.hpp"

namespace gcdnet::eval {

/// CSV `node,label,x_0..x_{d-1},xm_0..xm_{d-1}` for external PCA/t-SNE.
inline void write_embeddings(std::ostream& out, const num::Tensor& x, const num::Tensor& x_mixed,
                             const std::vector<graph::Label>& labels) {
    if (x.rows() != x_mixed.rows() || x.cols() != x_mixed.cols() || x.rows() != labels.size()) {
        throw ShapeError("export_embeddings: original " + num::shape_string(x.shape()) + ", mixed " +
                         num::shape_string(x_mixed.shape()) + ", " + std::to_string(labels.size()) + " labels");
    }
    const std::size_t d = x.cols();
    out << "node,label";
    for (std::size_t j = 0; j < d; ++j) out << ",x_" << j;
    for (std::size_t j = 0; j < d; ++j) out << ",xm_" << j;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out << i << ',' << graph::label_code(labels[i]);
        for (const auto* t : {&x, &x_mixed})
            for (std::size_t j = 0; j < d; ++j) {
                std::snprintf(buf, sizeof buf, "%.17g", (*t)(i, j));
                out << ',' << buf;
            }
        out << '\n';
    }
}

inline void export_embeddings(const num::Tensor& x, const num::Tensor& x_mixed, const std::vector<graph::Label>& labels,
                              const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write embeddings to " + path.string());
    write_embeddings(out, x, x_mixed, labels);
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace gcdnet::eval

#endif // GCDNET_EVALKIT_EXPORT_HPP

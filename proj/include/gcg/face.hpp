// Copyright 2026 The gcg-l1 Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#pragma once

#include <cstdint>
#include <vector>

#include "gcg/linops.hpp"

namespace gcg {

/// Role of one coordinate on a face of an orthant.
enum class FaceRole : std::uint8_t {
    Fixed,     ///< x_j = 0
    NonPos,    ///< x_j <= 0
    NonNeg,    ///< x_j >= 0
};

/// Partition (J0, J-, J+) of the coordinates; stored per coordinate so the
/// partition property holds by construction.
class FaceDescriptor {
public:
    FaceDescriptor() = default;
    explicit FaceDescriptor(std::vector<FaceRole> roles) : roles_(std::move(roles)) {}

    /// Builds a face from explicit index lists; they must partition {0..n-1}.
    static FaceDescriptor from_sets(Index n, const IndexSet& j0, const IndexSet& j_minus,
                                    const IndexSet& j_plus) {
        std::vector<int> seen(static_cast<std::size_t>(n), 0);
        std::vector<FaceRole> roles(static_cast<std::size_t>(n), FaceRole::Fixed);
        auto put = [&](const IndexSet& set, FaceRole role) {
            for (Index j : set) {
                if (j < 0 || j >= n) throw Error(ErrorKind::InvalidInput, "face index out of range");
                if (seen[static_cast<std::size_t>(j)]++)
                    throw Error(ErrorKind::InvalidInput, "face index sets overlap");
                roles[static_cast<std::size_t>(j)] = role;
            }
        };
        put(j0, FaceRole::Fixed);
        put(j_minus, FaceRole::NonPos);
        put(j_plus, FaceRole::NonNeg);
        for (int s : seen)
            if (s == 0) throw Error(ErrorKind::InvalidInput, "face index sets do not cover all coordinates");
        return FaceDescriptor(std::move(roles));
    }

    /// The face of the orthant containing x: (I0(x), I-(x), I+(x)).
    static FaceDescriptor of_point(const VectorXd& x) {
        std::vector<FaceRole> roles(static_cast<std::size_t>(x.size()));
        for (Index i = 0; i < x.size(); ++i)
            roles[static_cast<std::size_t>(i)] =
                x[i] == 0.0 ? FaceRole::Fixed : (x[i] < 0.0 ? FaceRole::NonPos : FaceRole::NonNeg);
        return FaceDescriptor(std::move(roles));
    }

    Index dim() const { return static_cast<Index>(roles_.size()); }
    FaceRole role(Index j) const { return roles_[static_cast<std::size_t>(j)]; }
    bool fixed(Index j) const { return role(j) == FaceRole::Fixed; }

    IndexSet j0() const { return collect(FaceRole::Fixed); }
    IndexSet j_minus() const { return collect(FaceRole::NonPos); }
    IndexSet j_plus() const { return collect(FaceRole::NonNeg); }

    Index fixed_count() const {
        Index c = 0;
        for (auto r : roles_) c += r == FaceRole::Fixed;
        return c;
    }

    bool contains(const VectorXd& x) const {
        if (x.size() != dim()) return false;
        for (Index j = 0; j < dim(); ++j) {
            switch (role(j)) {
                case FaceRole::Fixed:
                    if (x[j] != 0.0) return false;
                    break;
                case FaceRole::NonPos:
                    if (!(x[j] <= 0.0)) return false;
                    break;
                case FaceRole::NonNeg:
                    if (!(x[j] >= 0.0)) return false;
                    break;
            }
        }
        return true;
    }

    /// Orthogonal projection onto H = {x : x_j = 0 for j in J0}, in place.
    void project(VectorXd& v) const {
        for (Index j = 0; j < dim(); ++j)
            if (fixed(j)) v[j] = 0.0;
    }

    bool operator==(const FaceDescriptor&) const = default;

private:
    IndexSet collect(FaceRole r) const {
        IndexSet out;
        for (Index j = 0; j < dim(); ++j)
            if (role(j) == r) out.push_back(j);
        return out;
    }

    std::vector<FaceRole> roles_;
};

}  // namespace gcg

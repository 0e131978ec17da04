#pragma once

#include <optional>

#include "tibi/binning.hpp"

namespace tibi {

struct CellRef {
    int row = 0;
    int col = 0;

    friend bool operator==(const CellRef&, const CellRef&) = default;
};

// Everything needed to reproduce one rendered view.
struct ViewState {
    int nx = 50;
    int ny = 50;
    Scaling scaling = Scaling::Global;
    CategoryMode mode = CategoryMode::EscCode;
    FilterState filters;
    std::optional<CellRef> zoom;

    static ViewState defaults(const Dataset& dataset) {
        ViewState v;
        v.filters = FilterState::full(dataset);
        return v;
    }

    // Throws DomainError on bin counts below 1 or a zoom outside the matrix.
    void validate() const;

    friend bool operator==(const ViewState&, const ViewState&) = default;
};

}  // namespace tibi

#pragma once

#include "tinn/common.hpp"

namespace tinn {

// Requested pure partial derivatives of the model at a point.
// Supported maxima: d/dx up to 3, d/dy up to 2, d/dt up to 2; no mixed partials.
struct DerivRequest {
    int x_order = 0;
    int y_order = 0;
    int t_order = 0;
};

template <class S>
struct JetT {
    S u = 0, ux = 0, uxx = 0, uxxx = 0;
    S uy = 0, uyy = 0;
    S ut = 0, utt = 0;
};

using Jet = JetT<double>;

}  // namespace tinn

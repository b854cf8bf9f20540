#ifndef CVPHY_CVPHY_HPP
#define CVPHY_CVPHY_HPP

#include "cvphy/channel.hpp"
#include "cvphy/config.hpp"
#include "cvphy/csv.hpp"
#include "cvphy/dft.hpp"
#include "cvphy/fusion.hpp"
#include "cvphy/harness.hpp"
#include "cvphy/info.hpp"
#include "cvphy/kernels.hpp"
#include "cvphy/linalg.hpp"
#include "cvphy/metrics.hpp"
#include "cvphy/ofdm.hpp"
#include "cvphy/rng.hpp"
#include "cvphy/signal.hpp"
#include "cvphy/tensor.hpp"
#include "cvphy/tensor_io.hpp"

#endif

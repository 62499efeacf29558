#pragma once

#include "warplab/conedim.hpp"
#include "warplab/errors.hpp"
#include "warplab/geodesy.hpp"
#include "warplab/io.hpp"
#include "warplab/manifold.hpp"
#include "warplab/numeric.hpp"
#include "warplab/parallel.hpp"
#include "warplab/profile.hpp"
#include "warplab/scales.hpp"
#include "warplab/volume.hpp"
#include "warplab/warp.hpp"
#include "warplab/warp_io.hpp"

#ifndef RPCC_RPCC_HPP
#define RPCC_RPCC_HPP

#include "rpcc/boxes.hpp"
#include "rpcc/codec.hpp"
#include "rpcc/geometry.hpp"
#include "rpcc/gmm.hpp"
#include "rpcc/ground.hpp"
#include "rpcc/heatmap.hpp"
#include "rpcc/io.hpp"
#include "rpcc/kdtree.hpp"
#include "rpcc/manifest.hpp"
#include "rpcc/metrics.hpp"
#include "rpcc/projection.hpp"
#include "rpcc/roi.hpp"
#include "rpcc/sequence.hpp"
#include "rpcc/sweep.hpp"
#include "rpcc/synth.hpp"
#include "rpcc/transform.hpp"

#endif  // RPCC_RPCC_HPP

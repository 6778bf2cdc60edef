#ifndef COCO_COCO_HPP
#define COCO_COCO_HPP

#include "coco/bnb.hpp"
#include "coco/cli.hpp"
#include "coco/config.hpp"
#include "coco/diagnostics.hpp"
#include "coco/generators.hpp"
#include "coco/graph.hpp"
#include "coco/instance.hpp"
#include "coco/instance_io.hpp"
#include "coco/loss.hpp"
#include "coco/lp.hpp"
#include "coco/nn.hpp"
#include "coco/pipeline.hpp"
#include "coco/rng.hpp"
#include "coco/search.hpp"

#endif  // COCO_COCO_HPP

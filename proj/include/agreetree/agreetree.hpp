#pragma once

#include "agreetree/bench.hpp"
#include "agreetree/bounds.hpp"
#include "agreetree/decompose.hpp"
#include "agreetree/error.hpp"
#include "agreetree/exactmast.hpp"
#include "agreetree/generators.hpp"
#include "agreetree/leafset.hpp"
#include "agreetree/matchers.hpp"
#include "agreetree/newick.hpp"
#include "agreetree/random.hpp"
#include "agreetree/rooted_tree.hpp"
#include "agreetree/structure.hpp"
#include "agreetree/treeops.hpp"
#include "agreetree/unrooted_tree.hpp"

#pragma once

#include "ctxpat/common.hpp"
#include "ctxpat/compact_trie.hpp"
#include "ctxpat/cpc_index.hpp"
#include "ctxpat/cpm.hpp"
#include "ctxpat/em.hpp"
#include "ctxpat/heavy_path.hpp"
#include "ctxpat/lz77.hpp"
#include "ctxpat/mined_pattern.hpp"
#include "ctxpat/oracle.hpp"
#include "ctxpat/prefix_tree.hpp"
#include "ctxpat/range_counter.hpp"
#include "ctxpat/serialize.hpp"
#include "ctxpat/suffix_array.hpp"
#include "ctxpat/suffix_tree.hpp"
#include "ctxpat/text.hpp"

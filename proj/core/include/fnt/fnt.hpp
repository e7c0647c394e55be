#pragma once

#include "fnt/classify.hpp"
#include "fnt/dataset.hpp"
#include "fnt/embed_io.hpp"
#include "fnt/embedding.hpp"
#include "fnt/error.hpp"
#include "fnt/evaluate.hpp"
#include "fnt/report.hpp"
#include "fnt/sgns.hpp"
#include "fnt/train.hpp"
#include "fnt/type_system.hpp"
#include "fnt/vocab.hpp"
#include "fnt/windows.hpp"

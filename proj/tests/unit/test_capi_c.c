/* SPDX-License-Identifier: Apache-2.0 */
/* The public header must compile and link as plain C. */
#include <stdio.h>

#include "boxloss/boxloss.h"

int main(void) {
  bl_box a = {0.0, 0.0, 2.0, 2.0};
  bl_box b = {1.0, 1.0, 2.0, 2.0};
  double v = 0.0;
  bl_sim_config* cfg = NULL;
  if (bl_iou(&a, &b, &v) != BL_OK || v < 0.142 || v > 0.143) return 1;
  if (bl_sim_config_create(&cfg) != BL_OK) return 1;
  if (bl_sim_config_set(cfg, "nope", "1") != BL_ERR_INVALID_ARGUMENT) return 1;
  bl_sim_config_free(cfg);
  printf("boxloss %s\n", bl_version());
  return 0;
}

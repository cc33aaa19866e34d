"""Wasserstein GANs: weight clipping and gradient penalty variants."""

from typing import Mapping, Optional

import numpy as np

from advreg.algorithms.adversarial import common, objectives
from advreg.numkit import autodiff
from advreg.numkit.autodiff import Tensor


class WGANClip(common.AdversarialRegressionTrainer):
    """Critic parameters are clipped into ``[-clip_c, clip_c]`` after every update."""

    kind = "wgan_clip"

    def after_disc_step(self) -> None:
        self.disc = objectives.clip_weights(self.disc, self.config.gan.clip_c)


class WGANGP(common.AdversarialRegressionTrainer):
    """The critic loss carries a gradient penalty on real/fake interpolates."""

    kind = "wgan_gp"

    def disc_penalty(
        self,
        tape: autodiff.Tape,
        params: Mapping[str, Tensor],
        real_input: np.ndarray,
        fake_input: np.ndarray,
    ) -> Optional[Tensor]:
        return objectives.gradient_penalty(
            tape,
            self.disc,
            params,
            real_input,
            fake_input,
            self.config.gan.lambda_gp,
            self._penalty_rng,
        )

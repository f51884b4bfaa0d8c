// ODE fields, integrator, certificates; filled in below

@Skill(commType = "opcUa", module = "Manufacturing", description = "Processes a raw workpiece according to the processing specification")
public class ManuWBFForManufacturing {

    @SkillParameter(name = "workpieceId")
    private String workpieceId;

    @SkillParameter(name = "processingSpec")
    private String processingSpec;

    @SkillOutput(name = "processedWorkpieceId")
    private String processedWorkpieceId;

    @StateMachine
    private SkillStateMachine stateMachine;

    @Starting
    public void onStarting() {
        // TODO implement
    }

    @Execute
    public void onExecute() {
        // TODO implement
    }

    @Completing
    public void onCompleting() {
        // TODO implement
    }

    @Holding
    public void onHolding() {
        // TODO implement
    }

    @Unholding
    public void onUnholding() {
        // TODO implement
    }

    @Suspending
    public void onSuspending() {
        // TODO implement
    }

    @Unsuspending
    public void onUnsuspending() {
        // TODO implement
    }

    @Stopping
    public void onStopping() {
        // TODO implement
    }

    @Aborting
    public void onAborting() {
        // TODO implement
    }

    @Clearing
    public void onClearing() {
        // TODO implement
    }

    @Resetting
    public void onResetting() {
        // TODO implement
    }
}
